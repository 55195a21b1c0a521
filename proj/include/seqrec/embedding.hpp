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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace seqrec {

using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultEmbeddingDim = 384;
inline constexpr double kUnitNormTolerance = 1e-4;

enum class EmbedRole { kQuery, kPassage };

const char* role_name(EmbedRole role) noexcept;
// e5-style text prefix for a role ("query: " / "passage: ").
const char* role_prefix(EmbedRole role) noexcept;

struct ProviderContract {
  std::string name;
  std::size_t dimension = kDefaultEmbeddingDim;
  bool normalizes = true;
  // Whether the provider applies role prefixes itself.
  bool role_prefixing = false;
};

std::uint64_t provider_fingerprint(std::string_view name, std::size_t dimension);

// Deterministic text -> vector map. Implementations must return identical
// rows for identical (text, role).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual ProviderContract contract() const = 0;
  // One row per text, in input order.
  virtual EmbeddingMatrix encode(std::span<const std::string> texts, EmbedRole role) const = 0;

  std::uint64_t fingerprint() const {
    auto c = contract();
    return provider_fingerprint(c.name, c.dimension);
  }
};

// Calls the provider and checks its output against the declared contract:
// row count, dimension, finiteness, and unit norm when declared. Throws
// ContractError on any violation and ValidationError for empty texts.
EmbeddingMatrix embed(const EmbeddingProvider& provider, std::span<const std::string> texts,
                      EmbedRole role);

// Normalizes each row to unit L2 norm; all-zero rows are left unchanged.
void normalize_rows(EmbeddingMatrix& rows);

// Signed feature hashing of tokenize(text) into d buckets, L2-normalized. A
// text with no tokens maps to the basis vector e_0.
Eigen::VectorXf hash_mock_embed(std::string_view text, std::size_t d);

// Bucket and sign used by hash_mock_embed for one term.
std::size_t hash_mock_bucket(std::string_view term, std::size_t d);
float hash_mock_sign(std::string_view term);

class HashMockProvider : public EmbeddingProvider {
 public:
  explicit HashMockProvider(std::size_t dimension = kDefaultEmbeddingDim);

  ProviderContract contract() const override;
  EmbeddingMatrix encode(std::span<const std::string> texts, EmbedRole role) const override;

 private:
  std::size_t dimension_;
};

// Named rows of 32-bit reals. On disk (`SREMB1`): magic, u32 version,
// u32 dimension, u64 rows, provider name, row-major little-endian f32 data,
// then one key string per row.
struct EmbeddingTable {
  std::string provider_name;
  EmbeddingMatrix rows;
  std::vector<std::string> keys;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(rows.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(rows.rows()); }

  std::string serialize() const;
  static EmbeddingTable deserialize(std::string_view bytes, const std::string& source = "table");
};

void save_embedding_table(const std::filesystem::path& path, const EmbeddingTable& table);
EmbeddingTable load_embedding_table(const std::filesystem::path& path);

// Serves vectors from a precomputed table. Keys are role_prefix(role) + text,
// so one table holds both query and passage embeddings.
class PrecomputedProvider : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(EmbeddingTable table, bool normalizes = true);

  ProviderContract contract() const override;
  // Throws ContractError for a text without a stored row.
  EmbeddingMatrix encode(std::span<const std::string> texts, EmbedRole role) const override;

  static std::string key(std::string_view text, EmbedRole role);

 private:
  EmbeddingTable table_;
  bool normalizes_;
  std::unordered_map<std::string, Eigen::Index> lookup_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};
};

// Client for the sidecar's `POST /embed`.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string model_name,
                        std::size_t dimension = kDefaultEmbeddingDim, RetryPolicy retry = {});

  ProviderContract contract() const override;
  EmbeddingMatrix encode(std::span<const std::string> texts, EmbedRole role) const override;

 private:
  std::string base_url_;
  std::string model_name_;
  std::size_t dimension_;
  RetryPolicy retry_;
};

}  // namespace seqrec
