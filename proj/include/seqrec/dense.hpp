// Copyright 2026 The seqrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "seqrec/corpus.hpp"
#include "seqrec/embedding.hpp"
#include "seqrec/errors.hpp"
#include "seqrec/retrieval.hpp"
#include "seqrec/textify.hpp"

namespace seqrec {

// Exact maximum-inner-product search over every row of `rows`. Products are
// accumulated in double. Returns (row, score) pairs, best first, ties broken
// by ascending row.
template <typename RowsDerived, typename QueryDerived>
std::vector<std::pair<Eigen::Index, double>> exact_topk(
    const Eigen::MatrixBase<RowsDerived>& rows, const Eigen::MatrixBase<QueryDerived>& query,
    std::size_t k) {
  EIGEN_STATIC_ASSERT_VECTOR_ONLY(QueryDerived);
  if (query.size() != rows.cols()) {
    throw ContractError("query dimension " + std::to_string(query.size()) +
                        " does not match index dimension " + std::to_string(rows.cols()));
  }
  const Eigen::RowVectorXd q = query.template cast<double>().transpose();
  std::vector<std::pair<Eigen::Index, double>> scored(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    scored[static_cast<std::size_t>(i)] = {i, rows.row(i).template cast<double>().dot(q)};
  }
  rank_with_ties(
      scored, k, [](const auto& s) { return s.second; }, [](const auto& s) { return s.first; });
  return scored;
}

// Catalog embeddings, one row per item in catalog order.
class DenseIndex {
 public:
  DenseIndex(EmbeddingTable table, std::size_t declared_dimension);

  std::size_t dimension() const noexcept { return table_.dimension(); }
  std::size_t size() const noexcept { return table_.size(); }
  const std::string& provider_name() const noexcept { return table_.provider_name; }
  // provider_fingerprint(provider name, dimension).
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  const EmbeddingMatrix& matrix() const noexcept { return table_.rows; }
  const std::string& item_key(std::size_t row) const { return table_.keys.at(row); }
  const EmbeddingTable& table() const noexcept { return table_; }

  // Throws ValidationError unless rows align with the catalog's ordinals.
  void check_alignment(const Catalog& catalog) const;

 private:
  EmbeddingTable table_;
  std::uint64_t fingerprint_;
};

struct DenseBuildOptions {
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  // Engine-side L2 normalization for providers that do not normalize.
  bool normalize = true;
};

// Rows [0, completed_rows) of an interrupted build.
struct DenseCheckpoint {
  std::string provider_name;
  std::size_t completed_rows = 0;
  EmbeddingMatrix rows;
};

class DenseBuildError : public Error {
 public:
  DenseBuildError(ErrorCategory category, const std::string& message, DenseCheckpoint checkpoint)
      : Error(category, message), checkpoint_(std::move(checkpoint)) {}

  const DenseCheckpoint& checkpoint() const noexcept { return checkpoint_; }

 private:
  DenseCheckpoint checkpoint_;
};

// Embeds render_item() of every catalog item with the passage role. A
// provider failure raises DenseBuildError holding the completed prefix; pass
// that checkpoint back as `resume` to continue from it.
DenseIndex build_dense_index(const Catalog& catalog, const EmbeddingProvider& provider,
                             const DenseBuildOptions& options = {},
                             const DenseCheckpoint* resume = nullptr,
                             const PromptTemplate& tmpl = {});

std::vector<Hit> dense_topk(const DenseIndex& index, const Eigen::Ref<const Eigen::VectorXf>& query,
                            std::size_t k);

void save_dense_index(const std::filesystem::path& path, const DenseIndex& index);
DenseIndex load_dense_index(const std::filesystem::path& path);

// Embeds the query text with the query role and scans the index. Refuses a
// provider whose fingerprint differs from the one the index was built with.
class DenseRetriever : public Retriever {
 public:
  DenseRetriever(const DenseIndex& index, const EmbeddingProvider& provider,
                 bool normalize = true);

  std::string name() const override { return "dense:" + index_.provider_name(); }
  std::string fingerprint() const override;
  std::vector<Hit> retrieve(std::string_view query, std::size_t k) const override;

 private:
  const DenseIndex& index_;
  const EmbeddingProvider& provider_;
  bool normalize_;
};

}  // namespace seqrec
