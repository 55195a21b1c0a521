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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seqrec/corpus.hpp"
#include "seqrec/retrieval.hpp"
#include "seqrec/textify.hpp"

namespace seqrec {

// Lowercases (Unicode-aware where the C.UTF-8 locale is available) and splits
// on every non-alphanumeric code point. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::uint32_t doc;
  std::uint32_t tf;

  bool operator==(const Posting&) const = default;
};

// Okapi BM25 over an immutable inverted index. Document ordinals are the
// position of each document in the input (catalog order for catalog builds).
class LexicalIndex {
 public:
  // Throws IndexError for an empty document list.
  static LexicalIndex from_documents(std::span<const std::pair<ItemId, std::string>> documents,
                                     Bm25Params params = {});

  std::size_t num_docs() const noexcept { return ids_.size(); }
  double avgdl() const noexcept { return avgdl_; }
  const Bm25Params& params() const noexcept { return params_; }
  std::size_t num_terms() const noexcept { return terms_.size(); }

  const ItemId& doc_id(std::size_t ordinal) const { return ids_.at(ordinal); }
  std::uint32_t doc_length(std::size_t ordinal) const { return lengths_.at(ordinal); }

  std::size_t df(std::string_view term) const;
  // ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
  double idf(std::string_view term) const;
  // Postings sorted by document ordinal; empty for unknown terms.
  std::span<const Posting> postings(std::string_view term) const;
  std::uint32_t tf(std::string_view term, std::size_t ordinal) const;

  // BM25 of one document. Repeated query terms count once.
  double score(std::span<const std::string> query_terms, std::size_t ordinal) const;

  // Highest-scoring documents with score > 0, best first, ties by ordinal.
  std::vector<Hit> topk(std::span<const std::string> query_terms, std::size_t k) const;

  // `SRLEX1` binary image; identical indexes serialize to identical bytes.
  std::string serialize() const;
  static LexicalIndex deserialize(std::string_view bytes, const std::string& source = "index");

  std::uint64_t fingerprint() const;

 private:
  double term_weight(double idf, std::uint32_t tf, std::uint32_t length) const;
  const std::vector<Posting>* find_postings(std::string_view term) const;
  void finalize();

  Bm25Params params_;
  std::vector<ItemId> ids_;
  std::vector<std::uint32_t> lengths_;
  double avgdl_ = 0.0;
  std::vector<std::string> terms_;  // sorted
  std::vector<std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::size_t> term_index_;
};

// Indexes render_item() of every catalog item.
LexicalIndex build_lexical_index(const Catalog& catalog, Bm25Params params = {},
                                 const PromptTemplate& tmpl = {});

double score_bm25(const LexicalIndex& index, std::span<const std::string> query_terms,
                  std::size_t ordinal);

std::vector<Hit> lexical_topk(const LexicalIndex& index, std::string_view query, std::size_t k);

void save_lexical_index(const std::filesystem::path& path, const LexicalIndex& index);
LexicalIndex load_lexical_index(const std::filesystem::path& path);

class LexicalRetriever : public Retriever {
 public:
  explicit LexicalRetriever(const LexicalIndex& index) : index_(index) {}

  std::string name() const override { return "bm25"; }
  std::string fingerprint() const override;
  std::vector<Hit> retrieve(std::string_view query, std::size_t k) const override {
    return lexical_topk(index_, query, k);
  }

 private:
  const LexicalIndex& index_;
};

}  // namespace seqrec
