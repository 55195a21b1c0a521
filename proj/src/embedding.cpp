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

#include "seqrec/embedding.hpp"

#include <cmath>
#include <cstring>

#include <fmt/core.h>

#include "seqrec/binary_io.hpp"
#include "seqrec/errors.hpp"
#include "seqrec/http_client.hpp"
#include "seqrec/lexical.hpp"

namespace seqrec {

const char* role_name(EmbedRole role) noexcept {
  return role == EmbedRole::kQuery ? "query" : "passage";
}

const char* role_prefix(EmbedRole role) noexcept {
  return role == EmbedRole::kQuery ? "query: " : "passage: ";
}

std::uint64_t provider_fingerprint(std::string_view name, std::size_t dimension) {
  return fnv1a64(fmt::format("{}/{}", name, dimension));
}

EmbeddingMatrix embed(const EmbeddingProvider& provider, std::span<const std::string> texts,
                      EmbedRole role) {
  for (const auto& t : texts) {
    if (t.empty()) throw ValidationError("cannot embed an empty text");
  }
  const auto contract = provider.contract();
  EmbeddingMatrix rows = provider.encode(texts, role);
  if (static_cast<std::size_t>(rows.rows()) != texts.size()) {
    throw ContractError(fmt::format("{} returned {} vectors for {} texts", contract.name,
                                    rows.rows(), texts.size()));
  }
  if (static_cast<std::size_t>(rows.cols()) != contract.dimension) {
    throw ContractError(fmt::format("{} returned dimension {}, declared {}", contract.name,
                                    rows.cols(), contract.dimension));
  }
  if (!rows.allFinite()) throw ContractError(contract.name + " returned non-finite components");
  if (contract.normalizes) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double norm = rows.row(i).cast<double>().norm();
      if (std::abs(norm - 1.0) > kUnitNormTolerance) {
        throw ContractError(fmt::format("{} declared unit vectors but row {} has norm {}",
                                        contract.name, i, norm));
      }
    }
  }
  return rows;
}

void normalize_rows(EmbeddingMatrix& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).cast<double>().norm();
    if (norm > 0) rows.row(i) = (rows.row(i).cast<double>() / norm).cast<float>();
  }
}

// ---------------------------------------------------------------------------
// Hash mock

std::size_t hash_mock_bucket(std::string_view term, std::size_t d) {
  return static_cast<std::size_t>(fnv1a64(term) % d);
}

float hash_mock_sign(std::string_view term) {
  return (fnv1a64(term, 0x9e3779b97f4a7c15ULL) >> 63) ? -1.0f : 1.0f;
}

Eigen::VectorXf hash_mock_embed(std::string_view text, std::size_t d) {
  if (d < 2) throw ValidationError("hash mock embedding needs d >= 2");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (const auto& term : tokenize(text)) {
    acc[static_cast<Eigen::Index>(hash_mock_bucket(term, d))] += hash_mock_sign(term);
  }
  const double norm = acc.norm();
  if (norm == 0.0) return Eigen::VectorXf::Unit(static_cast<Eigen::Index>(d), 0);
  return (acc / norm).cast<float>();
}

HashMockProvider::HashMockProvider(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ < 2) throw ValidationError("hash mock embedding needs d >= 2");
}

ProviderContract HashMockProvider::contract() const {
  return {"hash-mock", dimension_, true, false};
}

EmbeddingMatrix HashMockProvider::encode(std::span<const std::string> texts, EmbedRole) const {
  EmbeddingMatrix rows(static_cast<Eigen::Index>(texts.size()),
                       static_cast<Eigen::Index>(dimension_));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = hash_mock_embed(texts[i], dimension_).transpose();
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Embedding tables

namespace {

constexpr std::string_view kTableMagic = "SREMB1";
constexpr std::uint32_t kTableVersion = 1;

}  // namespace

std::string EmbeddingTable::serialize() const {
  if (keys.size() != size()) throw ValidationError("embedding table keys/rows mismatch");
  ByteWriter w;
  w.bytes(kTableMagic);
  w.u32(kTableVersion);
  w.u32(static_cast<std::uint32_t>(dimension()));
  w.u64(size());
  w.str(provider_name);
  w.bytes(std::string_view(reinterpret_cast<const char*>(rows.data()),
                           static_cast<std::size_t>(rows.size()) * sizeof(float)));
  for (const auto& key : keys) w.str(key);
  return w.buffer();
}

EmbeddingTable EmbeddingTable::deserialize(std::string_view bytes, const std::string& source) {
  ByteReader r(bytes, source);
  if (bytes.size() < kTableMagic.size() || r.bytes(kTableMagic.size()) != kTableMagic) {
    throw ParseError(fmt::format("{}: not an {} embedding file", source, kTableMagic));
  }
  if (auto version = r.u32(); version != kTableVersion) {
    throw ParseError(fmt::format("{}: unsupported embedding file version {}", source, version));
  }
  EmbeddingTable table;
  const auto dim = r.u32();
  const auto count = r.u64();
  table.provider_name = r.str();
  table.rows.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  auto data = r.bytes(static_cast<std::size_t>(count) * dim * sizeof(float));
  std::memcpy(table.rows.data(), data.data(), data.size());
  table.keys.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) table.keys.push_back(r.str());
  if (!r.at_end()) throw ParseError(fmt::format("{}: trailing bytes after manifest", source));
  return table;
}

void save_embedding_table(const std::filesystem::path& path, const EmbeddingTable& table) {
  write_file(path, table.serialize());
}

EmbeddingTable load_embedding_table(const std::filesystem::path& path) {
  return EmbeddingTable::deserialize(read_file(path), path.string());
}

PrecomputedProvider::PrecomputedProvider(EmbeddingTable table, bool normalizes)
    : table_(std::move(table)), normalizes_(normalizes) {
  lookup_.reserve(table_.keys.size());
  for (std::size_t i = 0; i < table_.keys.size(); ++i) {
    lookup_.emplace(table_.keys[i], static_cast<Eigen::Index>(i));
  }
}

std::string PrecomputedProvider::key(std::string_view text, EmbedRole role) {
  return std::string(role_prefix(role)) + std::string(text);
}

ProviderContract PrecomputedProvider::contract() const {
  return {table_.provider_name, table_.dimension(), normalizes_, true};
}

EmbeddingMatrix PrecomputedProvider::encode(std::span<const std::string> texts,
                                            EmbedRole role) const {
  EmbeddingMatrix out(static_cast<Eigen::Index>(texts.size()), table_.rows.cols());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto it = lookup_.find(key(texts[i], role));
    if (it == lookup_.end()) {
      throw ContractError(fmt::format("{}: no precomputed {} vector for \"{}\"",
                                      table_.provider_name, role_name(role), texts[i]));
    }
    out.row(static_cast<Eigen::Index>(i)) = table_.rows.row(it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP provider

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string model_name,
                                             std::size_t dimension, RetryPolicy retry)
    : base_url_(std::move(base_url)),
      model_name_(std::move(model_name)),
      dimension_(dimension),
      retry_(retry) {}

ProviderContract HttpEmbeddingProvider::contract() const {
  return {model_name_, dimension_, true, true};
}

EmbeddingMatrix HttpEmbeddingProvider::encode(std::span<const std::string> texts,
                                              EmbedRole role) const {
  nlohmann::json request{{"texts", std::vector<std::string>(texts.begin(), texts.end())},
                         {"role", role_name(role)}};
  auto response = post_json(base_url_, "/embed", request, retry_);
  try {
    const auto dim = response.at("dim").get<std::size_t>();
    const auto& vectors = response.at("vectors");
    if (dim != dimension_) {
      throw ContractError(
          fmt::format("{} reports dimension {}, expected {}", model_name_, dim, dimension_));
    }
    EmbeddingMatrix out(static_cast<Eigen::Index>(vectors.size()),
                        static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const auto& v = vectors[i];
      if (v.size() != dim) {
        throw ContractError(fmt::format("{}: vector {} has {} components, expected {}",
                                        model_name_, i, v.size(), dim));
      }
      for (std::size_t j = 0; j < dim; ++j) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j].get<float>();
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(fmt::format("{}: malformed /embed response: {}", model_name_, e.what()));
  }
}

}  // namespace seqrec
