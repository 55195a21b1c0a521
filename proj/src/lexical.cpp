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

#include "seqrec/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <map>
#include <optional>

#include <fmt/core.h>

#include "seqrec/binary_io.hpp"
#include "seqrec/errors.hpp"

namespace seqrec {

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

const std::ctype<wchar_t>* unicode_ctype() {
  static const std::optional<std::locale> loc = []() -> std::optional<std::locale> {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    return std::nullopt;
  }();
  return loc ? &std::use_facet<std::ctype<wchar_t>>(*loc) : nullptr;
}

// Decodes one code point; malformed bytes decode to U+FFFD and advance by one.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  auto c = static_cast<unsigned char>(s[i]);
  std::size_t extra = 0;
  char32_t cp;
  if (c < 0x80) {
    ++i;
    return c;
  } else if ((c & 0xE0) == 0xC0) {
    extra = 1;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    extra = 2;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    extra = 3;
    cp = c & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + extra >= s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (std::size_t k = 1; k <= extra; ++k) {
    auto cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += extra + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_word_char(char32_t cp, const std::ctype<wchar_t>* ct) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp == 0xFFFD) return false;
  if (ct == nullptr) return true;
  return ct->is(std::ctype_base::alnum, static_cast<wchar_t>(cp));
}

char32_t to_lower(char32_t cp, const std::ctype<wchar_t>* ct) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  if (ct == nullptr) return cp;
  return static_cast<char32_t>(ct->tolower(static_cast<wchar_t>(cp)));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  const auto* ct = unicode_ctype();
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = next_code_point(text, i);
    if (is_word_char(cp, ct)) {
      append_utf8(current, to_lower(cp, ct));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// ---------------------------------------------------------------------------
// Index

namespace {

constexpr std::string_view kLexicalMagic = "SRLEX1";
constexpr std::uint32_t kLexicalVersion = 1;

std::vector<std::string> unique_terms(std::span<const std::string> terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

}  // namespace

LexicalIndex LexicalIndex::from_documents(
    std::span<const std::pair<ItemId, std::string>> documents, Bm25Params params) {
  if (documents.empty()) throw IndexError("cannot index an empty catalog");
  LexicalIndex index;
  index.params_ = params;
  std::map<std::string, std::vector<Posting>> postings;
  for (std::size_t doc = 0; doc < documents.size(); ++doc) {
    const auto& [id, text] = documents[doc];
    auto terms = tokenize(text);
    index.ids_.push_back(id);
    index.lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    std::map<std::string, std::uint32_t> counts;
    for (auto& t : terms) ++counts[std::move(t)];
    for (auto& [term, tf] : counts) {
      postings[term].push_back({static_cast<std::uint32_t>(doc), tf});
    }
  }
  for (auto& [term, list] : postings) {
    index.terms_.push_back(term);
    index.postings_.push_back(std::move(list));
  }
  index.finalize();
  return index;
}

void LexicalIndex::finalize() {
  double total = 0;
  for (auto len : lengths_) total += len;
  avgdl_ = total / static_cast<double>(lengths_.size());
  term_index_.clear();
  term_index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) term_index_.emplace(terms_[i], i);
}

const std::vector<Posting>* LexicalIndex::find_postings(std::string_view term) const {
  auto it = term_index_.find(std::string(term));
  return it == term_index_.end() ? nullptr : &postings_[it->second];
}

std::size_t LexicalIndex::df(std::string_view term) const {
  const auto* list = find_postings(term);
  return list == nullptr ? 0 : list->size();
}

double LexicalIndex::idf(std::string_view term) const {
  const double n = static_cast<double>(num_docs());
  const double df_t = static_cast<double>(df(term));
  return std::log(1.0 + (n - df_t + 0.5) / (df_t + 0.5));
}

std::span<const Posting> LexicalIndex::postings(std::string_view term) const {
  const auto* list = find_postings(term);
  if (list == nullptr) return {};
  return *list;
}

std::uint32_t LexicalIndex::tf(std::string_view term, std::size_t ordinal) const {
  auto list = postings(term);
  auto it = std::lower_bound(list.begin(), list.end(), ordinal,
                             [](const Posting& p, std::size_t d) { return p.doc < d; });
  return (it != list.end() && it->doc == ordinal) ? it->tf : 0;
}

double LexicalIndex::term_weight(double idf, std::uint32_t tf, std::uint32_t length) const {
  const double f = tf;
  const double norm = avgdl_ > 0 ? static_cast<double>(length) / avgdl_ : 1.0;
  return idf * f * (params_.k1 + 1.0) / (f + params_.k1 * (1.0 - params_.b + params_.b * norm));
}

double LexicalIndex::score(std::span<const std::string> query_terms, std::size_t ordinal) const {
  if (ordinal >= num_docs()) throw IndexError(fmt::format("document ordinal {} out of range", ordinal));
  double total = 0;
  for (const auto& term : unique_terms(query_terms)) {
    auto f = tf(term, ordinal);
    if (f == 0) continue;
    total += term_weight(idf(term), f, lengths_[ordinal]);
  }
  return total;
}

std::vector<Hit> LexicalIndex::topk(std::span<const std::string> query_terms,
                                    std::size_t k) const {
  std::vector<double> scores(num_docs(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& term : unique_terms(query_terms)) {
    const auto* list = find_postings(term);
    if (list == nullptr) continue;
    const double w = idf(term);
    for (const auto& p : *list) {
      if (scores[p.doc] == 0.0) touched.push_back(p.doc);
      scores[p.doc] += term_weight(w, p.tf, lengths_[p.doc]);
    }
  }
  std::vector<Hit> hits;
  hits.reserve(touched.size());
  for (auto doc : touched) {
    if (scores[doc] > 0) hits.push_back({doc, ids_[doc], scores[doc]});
  }
  rank_hits(hits, k);
  return hits;
}

std::string LexicalIndex::serialize() const {
  ByteWriter w;
  w.bytes(kLexicalMagic);
  w.u32(kLexicalVersion);
  w.f64(params_.k1);
  w.f64(params_.b);
  w.u64(num_docs());
  w.u64(terms_.size());
  for (std::size_t d = 0; d < num_docs(); ++d) {
    w.str(ids_[d].value);
    w.u32(lengths_[d]);
  }
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    w.str(terms_[t]);
    w.u32(static_cast<std::uint32_t>(postings_[t].size()));
    for (const auto& p : postings_[t]) {
      w.u32(p.doc);
      w.u32(p.tf);
    }
  }
  return w.buffer();
}

LexicalIndex LexicalIndex::deserialize(std::string_view bytes, const std::string& source) {
  ByteReader r(bytes, source);
  if (bytes.size() < kLexicalMagic.size() || r.bytes(kLexicalMagic.size()) != kLexicalMagic) {
    throw ParseError(fmt::format("{}: not an {} lexical index", source, kLexicalMagic));
  }
  if (auto version = r.u32(); version != kLexicalVersion) {
    throw ParseError(fmt::format("{}: unsupported lexical index version {}", source, version));
  }
  LexicalIndex index;
  index.params_.k1 = r.f64();
  index.params_.b = r.f64();
  const auto docs = r.u64();
  const auto terms = r.u64();
  if (docs == 0) throw ParseError(fmt::format("{}: index has no documents", source));
  for (std::uint64_t d = 0; d < docs; ++d) {
    index.ids_.emplace_back(r.str());
    index.lengths_.push_back(r.u32());
  }
  for (std::uint64_t t = 0; t < terms; ++t) {
    index.terms_.push_back(r.str());
    std::vector<Posting> list(r.u32());
    for (auto& p : list) {
      p.doc = r.u32();
      p.tf = r.u32();
      if (p.doc >= docs) throw ParseError(fmt::format("{}: posting out of range", source));
    }
    index.postings_.push_back(std::move(list));
  }
  if (!r.at_end()) throw ParseError(fmt::format("{}: trailing bytes after index", source));
  index.finalize();
  return index;
}

std::uint64_t LexicalIndex::fingerprint() const { return fnv1a64(serialize()); }

LexicalIndex build_lexical_index(const Catalog& catalog, Bm25Params params,
                                 const PromptTemplate& tmpl) {
  std::vector<std::pair<ItemId, std::string>> docs;
  docs.reserve(catalog.size());
  for (const auto& item : catalog.items()) docs.emplace_back(item.id, render_item(item, tmpl));
  return LexicalIndex::from_documents(docs, params);
}

double score_bm25(const LexicalIndex& index, std::span<const std::string> query_terms,
                  std::size_t ordinal) {
  return index.score(query_terms, ordinal);
}

std::vector<Hit> lexical_topk(const LexicalIndex& index, std::string_view query, std::size_t k) {
  if (k == 0) throw ValidationError("top-k needs k >= 1");
  auto terms = tokenize(query);
  return index.topk(terms, k);
}

void save_lexical_index(const std::filesystem::path& path, const LexicalIndex& index) {
  write_file(path, index.serialize());
}

LexicalIndex load_lexical_index(const std::filesystem::path& path) {
  return LexicalIndex::deserialize(read_file(path), path.string());
}

std::string LexicalRetriever::fingerprint() const {
  return "srlex1:" + hex64(index_.fingerprint());
}

}  // namespace seqrec
