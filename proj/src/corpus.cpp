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

#include "seqrec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <set>
#include <unordered_set>

#include <fmt/core.h>
#include <zlib.h>

#include "seqrec/binary_io.hpp"
#include "seqrec/errors.hpp"
#include "seqrec/loose_json.hpp"

namespace seqrec {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Catalog

Catalog::Catalog(std::vector<Item> items) {
  std::unordered_set<std::string> seen;
  items_.reserve(items.size());
  for (auto& item : items) {
    if (item.excluded) continue;
    if (!seen.insert(item.id.value).second) continue;
    items_.push_back(std::move(item));
  }
  if (items_.empty()) throw ValidationError("catalog has no retrievable items");
  std::sort(items_.begin(), items_.end(),
            [](const Item& a, const Item& b) { return a.id < b.id; });
  ordinals_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) ordinals_.emplace(items_[i].id, i);
}

const Item* Catalog::find(const ItemId& id) const {
  auto it = ordinals_.find(id);
  return it == ordinals_.end() ? nullptr : &items_[it->second];
}

const Item& Catalog::at(const ItemId& id) const {
  const Item* item = find(id);
  if (item == nullptr) throw ValidationError(fmt::format("unknown item {}", id.value));
  return *item;
}

std::optional<std::size_t> Catalog::ordinal(const ItemId& id) const {
  auto it = ordinals_.find(id);
  if (it == ordinals_.end()) return std::nullopt;
  return it->second;
}

void SegmentThresholds::validate() const {
  if (lower == 0 || lower >= upper) {
    throw ValidationError(
        fmt::format("segment thresholds need 0 < l < h, got l={} h={}", lower, upper));
  }
}

const char* segment_name(Segment segment) noexcept {
  switch (segment) {
    case Segment::kColdStart: return "cold_start";
    case Segment::kRegular: return "regular";
    case Segment::kPower: return "power";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Raw dump parsing

namespace {

template <typename F>
void for_each_line(std::istream& in, F&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) fn(++number, std::string_view(line));
  if (in.bad()) throw IoError("record stream unreadable");
}

// gzread passes plain files through unchanged, so one path handles both.
template <typename F>
void for_each_line_file(const std::filesystem::path& path, F&& fn) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw IoError(fmt::format("cannot open {}", path.string()));
  gzbuffer(file, 1 << 17);
  std::string pending;
  std::size_t number = 0;
  char chunk[1 << 16];
  for (;;) {
    int n = gzread(file, chunk, sizeof(chunk));
    if (n < 0) {
      int code = 0;
      std::string message = gzerror(file, &code);
      gzclose(file);
      throw IoError(fmt::format("{}: {}", path.string(), message));
    }
    if (n == 0) break;
    pending.append(chunk, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t nl; (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
      fn(++number, std::string_view(pending).substr(start, nl - start));
    }
    pending.erase(0, start);
  }
  gzclose(file);
  if (!pending.empty()) fn(++number, std::string_view(pending));
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

const json* lookup(const json& record, const std::vector<std::string>& aliases) {
  for (const auto& name : aliases) {
    auto it = record.find(name);
    if (it != record.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::optional<std::string> id_field(const json& record, const std::vector<std::string>& aliases) {
  const json* v = lookup(record, aliases);
  if (v == nullptr) return std::nullopt;
  std::string out;
  if (v->is_string()) {
    out = std::string(trim(v->get_ref<const std::string&>()));
  } else if (v->is_number_integer()) {
    out = v->dump();
  } else {
    return std::nullopt;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<std::int64_t> timestamp_field(const json& record,
                                            const std::vector<std::string>& aliases) {
  const json* v = lookup(record, aliases);
  if (v == nullptr) return std::nullopt;
  std::int64_t ts = 0;
  if (v->is_number_integer()) {
    ts = v->get<std::int64_t>();
  } else if (v->is_number_float()) {
    ts = static_cast<std::int64_t>(v->get<double>());
  } else if (v->is_string()) {
    auto s = trim(v->get_ref<const std::string&>());
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), ts);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (ts < 0) return std::nullopt;
  return ts;
}

std::string attribute_text(const json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

class BadLineTracker {
 public:
  void ok() { ++report_.lines; }
  void bad(std::size_t line_number) {
    ++report_.lines;
    ++report_.bad_lines;
    if (report_.first_bad_line == 0) report_.first_bad_line = line_number;
  }
  ParseReport& report() { return report_; }

  void check(const char* what) const {
    if (report_.lines == 0) return;
    double fraction = static_cast<double>(report_.bad_lines) / static_cast<double>(report_.lines);
    if (fraction > kMaxBadLineFraction) {
      throw CorpusFormatError(
          fmt::format("{}: {} of {} lines unparseable (first bad line {})", what,
                      report_.bad_lines, report_.lines, report_.first_bad_line),
          report_.first_bad_line);
    }
  }

 private:
  ParseReport report_;
};

class ReviewParser {
 public:
  explicit ReviewParser(const FieldAliases& aliases) : aliases_(aliases) {}

  void operator()(std::size_t number, std::string_view line) {
    if (is_blank(line)) return;
    auto record = parse_loose_object(line);
    if (!record) return tracker_.bad(number);
    auto user = id_field(*record, aliases_.user);
    auto item = id_field(*record, aliases_.item);
    auto ts = timestamp_field(*record, aliases_.timestamp);
    if (!user || !item || !ts) return tracker_.bad(number);
    tracker_.ok();
    out_.records.push_back(Interaction{std::move(*user), ItemId(std::move(*item)), *ts});
  }

  Parsed<Interaction> finish() {
    tracker_.check("reviews");
    out_.report = tracker_.report();
    return std::move(out_);
  }

 private:
  const FieldAliases& aliases_;
  BadLineTracker tracker_;
  Parsed<Interaction> out_;
};

class MetadataParser {
 public:
  explicit MetadataParser(const FieldAliases& aliases) : aliases_(aliases) {}

  void operator()(std::size_t number, std::string_view line) {
    if (is_blank(line)) return;
    auto record = parse_loose_object(line);
    if (!record) return tracker_.bad(number);
    auto id = id_field(*record, aliases_.item);
    if (!id) return tracker_.bad(number);
    tracker_.ok();
    if (!seen_.insert(*id).second) {
      ++tracker_.report().duplicates;
      return;
    }
    Item item;
    item.id = ItemId(std::move(*id));
    const json* title = lookup(*record, aliases_.title);
    if (title != nullptr && title->is_string()) {
      item.title = std::string(trim(title->get_ref<const std::string&>()));
    }
    if (item.title.empty()) {
      item.excluded = true;
      ++tracker_.report().excluded;
    }
    for (const auto& name : aliases_.extra) {
      auto it = record->find(name);
      if (it != record->end() && !it->is_null()) {
        item.extra_attributes.emplace_back(name, attribute_text(*it));
      }
    }
    out_.records.push_back(std::move(item));
  }

  Parsed<Item> finish() {
    tracker_.check("metadata");
    out_.report = tracker_.report();
    return std::move(out_);
  }

 private:
  const FieldAliases& aliases_;
  BadLineTracker tracker_;
  std::unordered_set<std::string> seen_;
  Parsed<Item> out_;
};

}  // namespace

Parsed<Interaction> parse_reviews(std::istream& in, const FieldAliases& aliases) {
  ReviewParser parser(aliases);
  for_each_line(in, parser);
  return parser.finish();
}

Parsed<Item> parse_metadata(std::istream& in, const FieldAliases& aliases) {
  MetadataParser parser(aliases);
  for_each_line(in, parser);
  return parser.finish();
}

Parsed<Interaction> parse_reviews_file(const std::filesystem::path& path,
                                       const FieldAliases& aliases) {
  ReviewParser parser(aliases);
  for_each_line_file(path, parser);
  try {
    return parser.finish();
  } catch (const CorpusFormatError& e) {
    throw CorpusFormatError(fmt::format("{}: {}", path.string(), e.what()), e.first_bad_line());
  }
}

Parsed<Item> parse_metadata_file(const std::filesystem::path& path, const FieldAliases& aliases) {
  MetadataParser parser(aliases);
  for_each_line_file(path, parser);
  try {
    return parser.finish();
  } catch (const CorpusFormatError& e) {
    throw CorpusFormatError(fmt::format("{}: {}", path.string(), e.what()), e.first_bad_line());
  }
}

// ---------------------------------------------------------------------------
// Sequences, k-core, splits

SequenceBuild build_sequences(std::span<const Interaction> interactions, const Catalog& catalog) {
  SequenceBuild out;
  std::map<std::string, std::vector<const Interaction*>> by_user;
  for (const auto& interaction : interactions) {
    if (!catalog.contains(interaction.item)) {
      ++out.report.dropped_unknown_item;
      continue;
    }
    by_user[interaction.user].push_back(&interaction);
  }
  out.sequences.reserve(by_user.size());
  for (auto& [user, events] : by_user) {
    if (events.size() < kMinSequenceLength) {
      ++out.report.dropped_short_users;
      out.report.dropped_short_interactions += events.size();
      continue;
    }
    // File order breaks timestamp ties.
    std::stable_sort(events.begin(), events.end(), [](const Interaction* a, const Interaction* b) {
      return a->timestamp < b->timestamp;
    });
    UserSequence seq;
    seq.user = user;
    seq.items.reserve(events.size());
    seq.timestamps.reserve(events.size());
    for (const Interaction* e : events) {
      seq.items.push_back(e->item);
      seq.timestamps.push_back(e->timestamp);
    }
    out.sequences.push_back(std::move(seq));
  }
  return out;
}

Catalog restrict_catalog(const Catalog& catalog, std::span<const UserSequence> sequences) {
  std::vector<bool> used(catalog.size(), false);
  for (const auto& seq : sequences) {
    for (const auto& id : seq.items) {
      if (auto ord = catalog.ordinal(id)) used[*ord] = true;
    }
  }
  std::vector<Item> items;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (used[i]) items.push_back(catalog.at_ordinal(i));
  }
  return Catalog(std::move(items));
}

namespace {

std::map<ItemId, std::size_t> item_counts(std::span<const UserSequence> sequences) {
  std::map<ItemId, std::size_t> counts;
  for (const auto& seq : sequences) {
    for (const auto& id : seq.items) ++counts[id];
  }
  return counts;
}

}  // namespace

KcoreReport validate_kcore(std::span<const UserSequence> sequences, std::size_t k,
                           KcoreMode mode) {
  if (k == 0) throw ValidationError("k-core threshold must be at least 1");
  KcoreReport report;
  for (const auto& seq : sequences) {
    if (seq.length() < k) report.user_violations.emplace_back(seq.user, seq.length());
  }
  std::sort(report.user_violations.begin(), report.user_violations.end());
  for (const auto& [id, count] : item_counts(sequences)) {
    if (count < k) report.item_violations.emplace_back(id, count);
  }
  if (mode == KcoreMode::kValidateOnly) return report;

  std::vector<UserSequence> current(sequences.begin(), sequences.end());
  for (bool changed = true; changed;) {
    changed = false;
    ++report.rounds;
    auto counts = item_counts(current);
    for (auto& seq : current) {
      UserSequence kept{seq.user, {}, {}};
      for (std::size_t i = 0; i < seq.items.size(); ++i) {
        if (counts[seq.items[i]] >= k) {
          kept.items.push_back(seq.items[i]);
          kept.timestamps.push_back(seq.timestamps.empty() ? 0 : seq.timestamps[i]);
        }
      }
      if (kept.items.size() != seq.items.size()) changed = true;
      seq = std::move(kept);
    }
    auto before = current.size();
    std::erase_if(current, [k](const UserSequence& s) { return s.length() < k; });
    if (current.size() != before) changed = true;
  }
  report.filtered = std::move(current);
  return report;
}

Splits leave_last_out_split(std::span<const UserSequence> sequences) {
  Splits splits;
  splits.train.reserve(sequences.size());
  splits.validation.reserve(sequences.size());
  splits.test.reserve(sequences.size());
  for (const auto& seq : sequences) {
    const std::size_t n = seq.length();
    if (n < kMinSequenceLength) {
      throw SplitError(
          fmt::format("user {} has {} interactions; leave-last-out needs at least {}", seq.user,
                      n, kMinSequenceLength));
    }
    auto prefix = [&](std::size_t len) {
      return std::vector<ItemId>(seq.items.begin(), seq.items.begin() + static_cast<long>(len));
    };
    splits.test.push_back({seq.user, prefix(n - 1), seq.items[n - 1], SplitRole::kTest, n});
    splits.validation.push_back(
        {seq.user, prefix(n - 2), seq.items[n - 2], SplitRole::kValidation, n});
    splits.train.push_back({seq.user, prefix(n - 2), seq.items[n - 2], SplitRole::kTrain, n});
  }
  return splits;
}

DatasetStats compute_stats(std::span<const UserSequence> sequences) {
  if (sequences.empty()) throw StatsError("cannot compute statistics of an empty corpus");
  DatasetStats stats;
  std::unordered_set<std::string> items;
  for (const auto& seq : sequences) {
    stats.num_interactions += seq.length();
    for (const auto& id : seq.items) items.insert(id.value);
  }
  stats.num_users = sequences.size();
  stats.num_items = items.size();
  stats.mean_seq_length =
      static_cast<double>(stats.num_interactions) / static_cast<double>(stats.num_users);
  return stats;
}

Segment assign_segment(std::size_t sequence_length, const SegmentThresholds& thresholds) {
  if (sequence_length <= thresholds.lower) return Segment::kColdStart;
  if (sequence_length <= thresholds.upper) return Segment::kRegular;
  return Segment::kPower;
}

// ---------------------------------------------------------------------------
// Corpus artifact

namespace {

constexpr std::string_view kCorpusMagic = "SEQREC1";
constexpr int kCorpusVersion = 1;

std::string dump_line(const json& record) {
  return record.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace

std::string serialize_corpus(const CorpusArtifact& corpus) {
  std::string out;
  out.append(kCorpusMagic);
  out.push_back('\n');
  out += dump_line({{"kind", "header"},
                    {"version", kCorpusVersion},
                    {"dataset", corpus.dataset},
                    {"items", corpus.items.size()},
                    {"users", corpus.sequences.size()}});
  for (const auto& item : corpus.items) {
    json record{{"kind", "item"}, {"id", item.id.value}, {"title", item.title}};
    if (!item.extra_attributes.empty()) record["extra"] = item.extra_attributes;
    out += dump_line(record);
  }
  for (const auto& seq : corpus.sequences) {
    json ids = json::array();
    for (const auto& id : seq.items) ids.push_back(id.value);
    out += dump_line(
        {{"kind", "user"}, {"user", seq.user}, {"items", ids}, {"timestamps", seq.timestamps}});
  }
  return out;
}

CorpusArtifact deserialize_corpus(std::string_view text, const std::string& source) {
  CorpusArtifact corpus;
  std::size_t record = 0;
  std::size_t start = 0;
  std::optional<std::pair<std::size_t, std::size_t>> declared;
  auto next_line = [&](std::string_view& line) {
    if (start >= text.size()) return false;
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    line = text.substr(start, nl - start);
    start = nl + 1;
    return true;
  };
  std::string_view line;
  if (!next_line(line) || line != kCorpusMagic) {
    throw ParseError(fmt::format("{}: missing {} header", source, kCorpusMagic), 0);
  }
  while (next_line(line)) {
    ++record;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      return ParseError(fmt::format("{}: record {}: {}", source, record, why), record);
    };
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded() || !value.is_object()) throw fail("not a JSON object");
    try {
      const auto kind = value.at("kind").get<std::string>();
      if (kind == "header") {
        if (value.at("version").get<int>() != kCorpusVersion) throw fail("unsupported version");
        corpus.dataset = value.at("dataset").get<std::string>();
        declared.emplace(value.at("items").get<std::size_t>(), value.at("users").get<std::size_t>());
      } else if (kind == "item") {
        Item item;
        item.id = ItemId(value.at("id").get<std::string>());
        item.title = value.at("title").get<std::string>();
        if (value.contains("extra")) {
          item.extra_attributes =
              value["extra"].get<std::vector<std::pair<std::string, std::string>>>();
        }
        corpus.items.push_back(std::move(item));
      } else if (kind == "user") {
        UserSequence seq;
        seq.user = value.at("user").get<std::string>();
        for (const auto& id : value.at("items")) seq.items.emplace_back(id.get<std::string>());
        seq.timestamps = value.at("timestamps").get<std::vector<std::int64_t>>();
        if (seq.timestamps.size() != seq.items.size()) throw fail("timestamps/items length mismatch");
        corpus.sequences.push_back(std::move(seq));
      } else {
        throw fail("unknown record kind " + kind);
      }
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
  }
  if (!declared) throw ParseError(fmt::format("{}: missing header record", source), 0);
  if (declared->first != corpus.items.size() || declared->second != corpus.sequences.size()) {
    throw ParseError(fmt::format("{}: header declares {} items / {} users, found {} / {}", source,
                                 declared->first, declared->second, corpus.items.size(),
                                 corpus.sequences.size()),
                     record);
  }
  return corpus;
}

void write_corpus(const std::filesystem::path& path, const CorpusArtifact& corpus) {
  write_file(path, serialize_corpus(corpus));
}

CorpusArtifact read_corpus(const std::filesystem::path& path) {
  return deserialize_corpus(read_file(path), path.string());
}

}  // namespace seqrec
