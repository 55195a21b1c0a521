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

#include "seqrec/dense.hpp"

#include <future>

#include <fmt/core.h>

#include "seqrec/binary_io.hpp"

namespace seqrec {

DenseIndex::DenseIndex(EmbeddingTable table, std::size_t declared_dimension)
    : table_(std::move(table)),
      fingerprint_(provider_fingerprint(table_.provider_name, table_.dimension())) {
  if (table_.dimension() != declared_dimension) {
    throw ContractError(fmt::format("dense index has dimension {}, expected {}",
                                    table_.dimension(), declared_dimension));
  }
  if (table_.keys.size() != table_.size()) {
    throw ParseError("dense index manifest does not match its row count");
  }
}

void DenseIndex::check_alignment(const Catalog& catalog) const {
  if (size() != catalog.size()) {
    throw ValidationError(
        fmt::format("dense index has {} rows but the catalog has {} items", size(), catalog.size()));
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (table_.keys[i] != catalog.at_ordinal(i).id.value) {
      throw ValidationError(fmt::format("dense index row {} is {} but catalog ordinal {} is {}", i,
                                        table_.keys[i], i, catalog.at_ordinal(i).id.value));
    }
  }
}

DenseIndex build_dense_index(const Catalog& catalog, const EmbeddingProvider& provider,
                             const DenseBuildOptions& options, const DenseCheckpoint* resume,
                             const PromptTemplate& tmpl) {
  const auto contract = provider.contract();
  const auto n = static_cast<Eigen::Index>(catalog.size());
  const auto d = static_cast<Eigen::Index>(contract.dimension);
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  const std::size_t in_flight = std::max<std::size_t>(1, options.max_in_flight);

  std::vector<std::string> texts;
  texts.reserve(catalog.size());
  for (const auto& item : catalog.items()) texts.push_back(render_item(item, tmpl));

  EmbeddingMatrix rows(n, d);
  std::size_t done = 0;
  if (resume != nullptr) {
    if (resume->provider_name != contract.name || resume->rows.cols() != d ||
        resume->rows.rows() != n || resume->completed_rows > catalog.size()) {
      throw ValidationError("checkpoint does not belong to this catalog and provider");
    }
    done = resume->completed_rows;
    rows.topRows(static_cast<Eigen::Index>(done)) =
        resume->rows.topRows(static_cast<Eigen::Index>(done));
  }

  auto embed_batch = [&](std::size_t begin) {
    const std::size_t end = std::min(begin + batch, texts.size());
    auto span = std::span<const std::string>(texts).subspan(begin, end - begin);
    return embed(provider, span, EmbedRole::kPassage);
  };

  while (done < texts.size()) {
    std::vector<std::pair<std::size_t, std::future<EmbeddingMatrix>>> window;
    for (std::size_t start = done; start < texts.size() && window.size() < in_flight;
         start += batch) {
      window.emplace_back(start, std::async(std::launch::async, embed_batch, start));
    }
    for (auto& [start, future] : window) {
      try {
        EmbeddingMatrix part = future.get();
        rows.middleRows(static_cast<Eigen::Index>(start), part.rows()) = part;
        if (start == done) done += static_cast<std::size_t>(part.rows());
      } catch (const Error& e) {
        // Later batches of this window are discarded; the checkpoint is the
        // contiguous prefix.
        for (auto& [s, f] : window) {
          if (f.valid()) f.wait();
        }
        throw DenseBuildError(
            e.category(),
            fmt::format("dense index build stopped after {} of {} rows: {}", done, texts.size(),
                        e.what()),
            DenseCheckpoint{contract.name, done, rows});
      }
    }
  }

  if (options.normalize && !contract.normalizes) normalize_rows(rows);

  EmbeddingTable table;
  table.provider_name = contract.name;
  table.rows = std::move(rows);
  table.keys.reserve(catalog.size());
  for (const auto& item : catalog.items()) table.keys.push_back(item.id.value);
  return DenseIndex(std::move(table), contract.dimension);
}

std::vector<Hit> dense_topk(const DenseIndex& index, const Eigen::Ref<const Eigen::VectorXf>& query,
                            std::size_t k) {
  if (k == 0) throw ValidationError("top-k needs k >= 1");
  std::vector<Hit> hits;
  for (const auto& [row, score] : exact_topk(index.matrix(), query, k)) {
    const auto ordinal = static_cast<std::size_t>(row);
    hits.push_back({ordinal, ItemId(index.item_key(ordinal)), score});
  }
  return hits;
}

void save_dense_index(const std::filesystem::path& path, const DenseIndex& index) {
  save_embedding_table(path, index.table());
}

DenseIndex load_dense_index(const std::filesystem::path& path) {
  auto table = load_embedding_table(path);
  const auto dim = table.dimension();
  return DenseIndex(std::move(table), dim);
}

DenseRetriever::DenseRetriever(const DenseIndex& index, const EmbeddingProvider& provider,
                               bool normalize)
    : index_(index), provider_(provider), normalize_(normalize) {
  if (provider_.fingerprint() != index_.fingerprint()) {
    const auto c = provider_.contract();
    throw ContractError(fmt::format(
        "index was built by {} (d={}) but the query provider is {} (d={})",
        index_.provider_name(), index_.dimension(), c.name, c.dimension));
  }
}

std::string DenseRetriever::fingerprint() const {
  return "sremb1:" + hex64(index_.fingerprint()) + ":" +
         hex64(fnv1a64(index_.table().serialize()));
}

std::vector<Hit> DenseRetriever::retrieve(std::string_view query, std::size_t k) const {
  const std::string text(query);
  EmbeddingMatrix q = embed(provider_, std::span<const std::string>(&text, 1), EmbedRole::kQuery);
  if (normalize_ && !provider_.contract().normalizes) normalize_rows(q);
  return dense_topk(index_, q.row(0).transpose(), k);
}

}  // namespace seqrec
