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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace seqrec {

// Opaque catalog identifier (an ASIN for the Amazon dumps).
struct ItemId {
  std::string value;

  ItemId() = default;
  explicit ItemId(std::string v) : value(std::move(v)) {}

  auto operator<=>(const ItemId&) const = default;
  bool operator==(const ItemId&) const = default;
};

struct ItemIdHash {
  std::size_t operator()(const ItemId& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};

struct Item {
  ItemId id;
  std::string title;
  std::vector<std::pair<std::string, std::string>> extra_attributes;
  // Set at ingestion when the record has no usable title.
  bool excluded = false;
};

// Retrievable items ordered by ItemId. That order defines document ordinals
// for every index built over the catalog.
class Catalog {
 public:
  // Excluded items are skipped; the first occurrence of a duplicate id wins.
  // Throws ValidationError when nothing retrievable remains.
  explicit Catalog(std::vector<Item> items);

  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<Item>& items() const noexcept { return items_; }
  const Item& at_ordinal(std::size_t ordinal) const { return items_.at(ordinal); }

  const Item* find(const ItemId& id) const;
  // Throws ValidationError for unknown ids.
  const Item& at(const ItemId& id) const;
  std::optional<std::size_t> ordinal(const ItemId& id) const;
  bool contains(const ItemId& id) const { return ordinal(id).has_value(); }

 private:
  std::vector<Item> items_;
  std::unordered_map<ItemId, std::size_t, ItemIdHash> ordinals_;
};

struct Interaction {
  std::string user;
  ItemId item;
  std::int64_t timestamp = 0;
};

struct UserSequence {
  std::string user;
  std::vector<ItemId> items;
  std::vector<std::int64_t> timestamps;

  std::size_t length() const noexcept { return items.size(); }
};

enum class SplitRole { kTrain, kValidation, kTest };

struct SplitExample {
  std::string user;
  std::vector<ItemId> history;
  ItemId target;
  SplitRole role = SplitRole::kTest;
  // Length n of the full sequence the example was cut from.
  std::size_t sequence_length = 0;
};

struct Splits {
  std::vector<SplitExample> train;
  std::vector<SplitExample> validation;
  std::vector<SplitExample> test;
};

struct SegmentThresholds {
  std::size_t lower = 5;
  std::size_t upper = 14;

  // Throws ValidationError unless 0 < lower < upper.
  void validate() const;
};

enum class Segment { kColdStart, kRegular, kPower };

const char* segment_name(Segment segment) noexcept;

struct DatasetStats {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t num_interactions = 0;
  double mean_seq_length = 0.0;
};

// Field names looked up in raw records; the first alias present wins.
struct FieldAliases {
  std::vector<std::string> user{"reviewerID"};
  std::vector<std::string> item{"asin"};
  std::vector<std::string> timestamp{"unixReviewTime"};
  std::vector<std::string> title{"title"};
  // Metadata fields copied into Item::extra_attributes, in this order.
  std::vector<std::string> extra{};
};

struct ParseReport {
  std::size_t lines = 0;  // non-blank lines seen
  std::size_t bad_lines = 0;
  std::size_t first_bad_line = 0;  // 1-based; 0 when every line parsed
  std::size_t excluded = 0;        // metadata records without a title
  std::size_t duplicates = 0;      // metadata records repeating an earlier id
};

template <typename Record>
struct Parsed {
  std::vector<Record> records;
  ParseReport report;
};

// Fraction of unparseable non-blank lines above which ingestion fails.
inline constexpr double kMaxBadLineFraction = 0.05;

Parsed<Interaction> parse_reviews(std::istream& in, const FieldAliases& aliases = {});
Parsed<Item> parse_metadata(std::istream& in, const FieldAliases& aliases = {});

// Same as above for a path; gzip-compressed files are detected and inflated.
Parsed<Interaction> parse_reviews_file(const std::filesystem::path& path,
                                       const FieldAliases& aliases = {});
Parsed<Item> parse_metadata_file(const std::filesystem::path& path,
                                 const FieldAliases& aliases = {});

struct SequenceBuildReport {
  std::size_t dropped_unknown_item = 0;  // interactions on excluded or absent items
  std::size_t dropped_short_users = 0;   // users left with fewer than kMinSequenceLength
  std::size_t dropped_short_interactions = 0;
};

inline constexpr std::size_t kMinSequenceLength = 3;

struct SequenceBuild {
  std::vector<UserSequence> sequences;  // ordered by user id
  SequenceBuildReport report;
};

SequenceBuild build_sequences(std::span<const Interaction> interactions, const Catalog& catalog);

// Catalog restricted to the items that occur in at least one sequence.
Catalog restrict_catalog(const Catalog& catalog, std::span<const UserSequence> sequences);

struct KcoreReport {
  std::vector<std::pair<std::string, std::size_t>> user_violations;
  std::vector<std::pair<ItemId, std::size_t>> item_violations;
  // Only populated in re-filter mode.
  std::optional<std::vector<UserSequence>> filtered;
  std::size_t rounds = 0;

  bool ok() const noexcept { return user_violations.empty() && item_violations.empty(); }
};

enum class KcoreMode { kValidateOnly, kRefilter };

// Reports users and items with fewer than k interactions. In re-filter mode,
// alternately drops such items and users until a fixpoint is reached; the
// violation lists then describe the input, and `filtered` the fixpoint.
KcoreReport validate_kcore(std::span<const UserSequence> sequences, std::size_t k = 5,
                           KcoreMode mode = KcoreMode::kValidateOnly);

// Test target is the last item; validation target the penultimate one. The
// training example for a user is its first n-1 items: history i_1..i_{n-2}
// and target i_{n-1}.
Splits leave_last_out_split(std::span<const UserSequence> sequences);

DatasetStats compute_stats(std::span<const UserSequence> sequences);

Segment assign_segment(std::size_t sequence_length, const SegmentThresholds& thresholds);

// Intermediate corpus artifact: `SEQREC1` line, then one JSON record per line.
struct CorpusArtifact {
  std::string dataset;
  std::vector<Item> items;
  std::vector<UserSequence> sequences;
};

std::string serialize_corpus(const CorpusArtifact& corpus);
CorpusArtifact deserialize_corpus(std::string_view text, const std::string& source = "corpus");

void write_corpus(const std::filesystem::path& path, const CorpusArtifact& corpus);
CorpusArtifact read_corpus(const std::filesystem::path& path);

}  // namespace seqrec
