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

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <zlib.h>

#include "doctest.h"
#include "seqrec/corpus.hpp"
#include "seqrec/errors.hpp"
#include "seqrec/loose_json.hpp"
#include "support.hpp"

using namespace seqrec;
using seqrec::testing::make_item;
using nlohmann::json;

namespace {

// Naive oracle, only valid when no string body contains a quote character.
json quote_swap_parse(std::string text) {
  std::replace(text.begin(), text.end(), '\'', '"');
  return json::parse(text);
}

UserSequence seq(std::string user, std::vector<std::string> items) {
  UserSequence s;
  s.user = std::move(user);
  for (std::size_t i = 0; i < items.size(); ++i) {
    s.items.emplace_back(items[i]);
    s.timestamps.push_back(static_cast<std::int64_t>(i));
  }
  return s;
}

Catalog catalog_of(std::initializer_list<const char*> ids) {
  std::vector<Item> items;
  for (const char* id : ids) items.push_back(make_item(id, std::string("item ") + id));
  return Catalog(std::move(items));
}

}  // namespace

TEST_CASE("loose literals agree with a quote-swap oracle on quote-free records") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcdefXYZ0189 -_.,:()";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text = "{";
    int fields = 1 + static_cast<int>(rng() % 5);
    for (int f = 0; f < fields; ++f) {
      if (f) text += ", ";
      text += "'k" + std::to_string(f) + "': ";
      if (rng() % 2) {
        std::string v;
        for (int c = static_cast<int>(rng() % 12); c > 0; --c) v += alphabet[rng() % alphabet.size()];
        text += "'" + v + "'";
      } else {
        text += std::to_string(rng() % 100000);
      }
    }
    text += "}";
    auto parsed = parse_loose_object(text);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == quote_swap_parse(text));
  }
}

TEST_CASE("loose literal details") {
  CHECK(parse_loose_object(R"({'title': 'Women\'s Wig', 'ok': True, 'x': None})") ==
        json{{"title", "Women's Wig"}, {"ok", true}, {"x", nullptr}});
  CHECK(parse_loose_object(R"({'title': "It's \"quoted\""})") ==
        json{{"title", "It's \"quoted\""}});
  CHECK(parse_loose_object(R"({'t': 'caf\xe9'})") == json{{"t", "caf\xc3\xa9"}});
  CHECK(parse_loose_object(R"({'t': u'snow ☃'})") == json{{"t", "snow \xe2\x98\x83"}});
  CHECK(parse_loose_object(R"({"True": "None"})") == json{{"True", "None"}});
  CHECK_FALSE(parse_loose_object("{'open: 1}").has_value());
  CHECK_FALSE(parse_loose_object("[1, 2]").has_value());
  CHECK_FALSE(parse_loose_object("").has_value());
}

TEST_CASE("parse_reviews maps strict and loose lines to the same interaction") {
  std::istringstream strict(R"({"reviewerID":"u1","asin":"A1","unixReviewTime":100})");
  std::istringstream loose("{'reviewerID': 'u1', 'asin': 'A1', 'unixReviewTime': 100}");
  auto a = parse_reviews(strict);
  auto b = parse_reviews(loose);
  REQUIRE(a.records.size() == 1);
  REQUIRE(b.records.size() == 1);
  CHECK(a.records[0].user == "u1");
  CHECK(a.records[0].item == ItemId("A1"));
  CHECK(a.records[0].timestamp == 100);
  CHECK(b.records[0].user == a.records[0].user);
  CHECK(b.records[0].item == a.records[0].item);
  CHECK(b.records[0].timestamp == a.records[0].timestamp);
}

TEST_CASE("parse_reviews on an empty stream") {
  std::istringstream in("");
  auto r = parse_reviews(in);
  CHECK(r.records.empty());
  CHECK(r.report.lines == 0);
  CHECK(r.report.bad_lines == 0);
}

TEST_CASE("bad lines are counted until they exceed five percent") {
  std::string ok = R"({"reviewerID":"u","asin":"A","unixReviewTime":1})";
  std::string text;
  for (int i = 0; i < 19; ++i) text += ok + "\n";
  text += "not a record\n\n";
  std::istringstream in(text);
  auto r = parse_reviews(in);
  CHECK(r.records.size() == 19);
  CHECK(r.report.bad_lines == 1);
  CHECK(r.report.first_bad_line == 20);

  std::string worse;
  for (int i = 0; i < 18; ++i) worse += ok + "\n";
  worse += "{'reviewerID': 'u'}\n" + ok + "\nbroken\n";
  std::istringstream in2(worse);
  try {
    parse_reviews(in2);
    FAIL("expected a corpus format error");
  } catch (const CorpusFormatError& e) {
    CHECK(e.first_bad_line() == 19);
  }
}

TEST_CASE("parse_metadata: titles, exclusion, duplicates, aliases") {
  std::istringstream in(
      "{\"asin\":\"A1\",\"title\":\"Sigma F80 - Flat Kabuki TM\"}\n"
      "{'asin': 'A2', 'price': 3.5}\n"
      "{'asin': 'A3', 'title': '   '}\n"
      "{\"asin\":\"A1\",\"title\":\"second copy\"}\n");
  auto r = parse_metadata(in);
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].title == "Sigma F80 - Flat Kabuki TM");
  CHECK_FALSE(r.records[0].excluded);
  CHECK(r.records[1].excluded);
  CHECK(r.records[2].excluded);
  CHECK(r.report.excluded == 2);
  CHECK(r.report.duplicates == 1);

  FieldAliases aliases;
  aliases.item = {"parent_asin", "asin"};
  aliases.title = {"name"};
  aliases.extra = {"brand"};
  std::istringstream in2(R"({"parent_asin":"P","name":"N","brand":"B"})");
  auto r2 = parse_metadata(in2, aliases);
  REQUIRE(r2.records.size() == 1);
  CHECK(r2.records[0].id == ItemId("P"));
  CHECK(r2.records[0].extra_attributes ==
        std::vector<std::pair<std::string, std::string>>{{"brand", "B"}});
}

TEST_CASE("gzip and plain files parse identically") {
  auto dir = seqrec::testing::scratch_dir("gz");
  const std::string text = "{'reviewerID': 'u1', 'asin': 'A1', 'unixReviewTime': 5}\n";
  {
    std::ofstream(dir / "plain.json") << text;
    gzFile gz = gzopen((dir / "packed.json.gz").c_str(), "wb");
    gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
    gzclose(gz);
  }
  auto a = parse_reviews_file(dir / "plain.json");
  auto b = parse_reviews_file(dir / "packed.json.gz");
  REQUIRE(a.records.size() == 1);
  REQUIRE(b.records.size() == 1);
  CHECK(a.records[0].item == b.records[0].item);
  CHECK_THROWS_AS(parse_reviews_file(dir / "missing.json"), IoError);
}

TEST_CASE("catalog ordering, exclusion and lookups") {
  std::vector<Item> items{make_item("C", "c"), make_item("A", "a"), make_item("B", "b"),
                          make_item("A", "dup")};
  items.push_back(make_item("D", ""));
  items.back().excluded = true;
  Catalog cat(std::move(items));
  REQUIRE(cat.size() == 3);
  CHECK(cat.at_ordinal(0).id == ItemId("A"));
  CHECK(cat.at_ordinal(0).title == "a");
  CHECK(cat.ordinal(ItemId("C")) == 2u);
  CHECK_FALSE(cat.contains(ItemId("D")));
  CHECK_THROWS_AS(cat.at(ItemId("Z")), ValidationError);
  CHECK_THROWS_AS(Catalog({}), ValidationError);
}

TEST_CASE("build_sequences sorts by time, stably, and drops short users") {
  auto cat = catalog_of({"A", "B", "C", "D"});
  std::vector<Interaction> log{
      {"u1", ItemId("A"), 3}, {"u1", ItemId("B"), 1}, {"u1", ItemId("C"), 2},
      {"u2", ItemId("A"), 1}, {"u2", ItemId("B"), 1}, {"u2", ItemId("C"), 1},
      {"u3", ItemId("A"), 1}, {"u3", ItemId("X"), 2}, {"u3", ItemId("B"), 3},
  };
  auto built = build_sequences(log, cat);
  REQUIRE(built.sequences.size() == 2);
  CHECK(built.sequences[0].user == "u1");
  CHECK(built.sequences[0].items ==
        std::vector<ItemId>{ItemId("B"), ItemId("C"), ItemId("A")});
  CHECK(built.sequences[1].items ==
        std::vector<ItemId>{ItemId("A"), ItemId("B"), ItemId("C")});
  CHECK(built.report.dropped_unknown_item == 1);
  CHECK(built.report.dropped_short_users == 1);

  auto restricted = restrict_catalog(cat, built.sequences);
  CHECK(restricted.size() == 3);
  CHECK_FALSE(restricted.contains(ItemId("D")));
}

TEST_CASE("k-core validation and re-filtering") {
  std::vector<UserSequence> good;
  for (int u = 0; u < 5; ++u) good.push_back(seq("u" + std::to_string(u), {"A", "B", "C", "D", "E"}));
  CHECK(validate_kcore(good, 5).ok());

  auto with_short = good;
  with_short.push_back(seq("short", {"A", "B"}));
  auto report = validate_kcore(with_short, 5);
  REQUIRE(report.user_violations.size() == 1);
  CHECK(report.user_violations[0].first == "short");
  CHECK_FALSE(report.filtered.has_value());

  // Star graph: one hub item, four users with one interaction each. With k=2
  // the users go in round one, then the hub has no interactions left.
  std::vector<UserSequence> star;
  for (int u = 0; u < 4; ++u) star.push_back(seq("s" + std::to_string(u), {"HUB"}));
  auto refilter = validate_kcore(star, 2, KcoreMode::kRefilter);
  REQUIRE(refilter.filtered.has_value());
  CHECK(refilter.filtered->empty());
}

TEST_CASE("k-core re-filter reaches a fixpoint on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<UserSequence> seqs;
    int users = 5 + static_cast<int>(rng() % 20);
    for (int u = 0; u < users; ++u) {
      std::vector<std::string> items;
      for (int n = 1 + static_cast<int>(rng() % 8); n > 0; --n) {
        items.push_back("I" + std::to_string(rng() % 12));
      }
      seqs.push_back(seq("u" + std::to_string(u), items));
    }
    const std::size_t k = 1 + rng() % 4;
    auto r = validate_kcore(seqs, k, KcoreMode::kRefilter);
    REQUIRE(r.filtered.has_value());
    CHECK(validate_kcore(*r.filtered, k).ok());
  }
}

TEST_CASE("leave-last-out split") {
  std::vector<UserSequence> seqs{seq("u", {"A", "B", "C", "D"}), seq("v", {"A", "B", "C"})};
  auto splits = leave_last_out_split(seqs);
  REQUIRE(splits.test.size() == 2);
  CHECK(splits.test[0].history == std::vector<ItemId>{ItemId("A"), ItemId("B"), ItemId("C")});
  CHECK(splits.test[0].target == ItemId("D"));
  CHECK(splits.test[0].sequence_length == 4);
  CHECK(splits.validation[0].history == std::vector<ItemId>{ItemId("A"), ItemId("B")});
  CHECK(splits.validation[0].target == ItemId("C"));
  CHECK(splits.train[0].history == splits.validation[0].history);
  CHECK(splits.train[0].target == ItemId("C"));
  CHECK(splits.test[1].target == ItemId("C"));
  CHECK(splits.validation[1].target == ItemId("B"));

  std::vector<UserSequence> bad{seq("tiny", {"A", "B"})};
  CHECK_THROWS_WITH_AS(leave_last_out_split(bad), doctest::Contains("tiny"), SplitError);
}

TEST_CASE("split reconstruction property") {
  std::mt19937_64 rng(5);
  std::vector<UserSequence> seqs;
  for (int u = 0; u < 200; ++u) {
    std::vector<std::string> items;
    for (int n = 3 + static_cast<int>(rng() % 20); n > 0; --n) items.push_back("I" + std::to_string(rng() % 50));
    seqs.push_back(seq("u" + std::to_string(u), items));
  }
  auto splits = leave_last_out_split(seqs);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    auto rebuilt = splits.validation[i].history;
    rebuilt.push_back(splits.validation[i].target);
    rebuilt.push_back(splits.test[i].target);
    CHECK(rebuilt == seqs[i].items);
  }
}

TEST_CASE("compute_stats") {
  std::vector<UserSequence> one{seq("u", {"A", "B", "C"})};
  auto s = compute_stats(one);
  CHECK(s.num_users == 1);
  CHECK(s.num_items == 3);
  CHECK(s.num_interactions == 3);
  CHECK(s.mean_seq_length == doctest::Approx(3.0));
  CHECK_THROWS_AS(compute_stats({}), StatsError);
}

TEST_CASE("segment boundaries") {
  SegmentThresholds beauty{5, 14};
  CHECK(assign_segment(1, beauty) == Segment::kColdStart);
  CHECK(assign_segment(5, beauty) == Segment::kColdStart);
  CHECK(assign_segment(6, beauty) == Segment::kRegular);
  CHECK(assign_segment(14, beauty) == Segment::kRegular);
  CHECK(assign_segment(15, beauty) == Segment::kPower);
  CHECK_THROWS_AS((SegmentThresholds{5, 5}.validate()), ValidationError);
  CHECK_THROWS_AS((SegmentThresholds{0, 3}.validate()), ValidationError);
}

TEST_CASE("segments partition users for any thresholds") {
  for (std::size_t l = 1; l < 20; ++l) {
    for (std::size_t h = l + 1; h < 25; ++h) {
      SegmentThresholds t{l, h};
      std::map<Segment, int> counts;
      for (std::size_t n = 1; n <= 40; ++n) ++counts[assign_segment(n, t)];
      CHECK(counts[Segment::kColdStart] == static_cast<int>(l));
      CHECK(counts[Segment::kRegular] == static_cast<int>(h - l));
      CHECK(counts[Segment::kPower] == static_cast<int>(40 - h));
    }
  }
}

TEST_CASE("corpus artifact round trip and record-numbered errors") {
  CorpusArtifact a;
  a.dataset = "toy";
  a.items = {make_item("A", "alpha \"q\""), make_item("B", "beta")};
  a.items[0].extra_attributes = {{"brand", "X"}};
  a.sequences = {seq("u", {"A", "B", "A"})};
  auto text = serialize_corpus(a);
  CHECK(text.rfind("SEQREC1\n", 0) == 0);
  auto b = deserialize_corpus(text);
  CHECK(b.dataset == "toy");
  REQUIRE(b.items.size() == 2);
  CHECK(b.items[0].title == "alpha \"q\"");
  CHECK(b.items[0].extra_attributes == a.items[0].extra_attributes);
  CHECK(b.sequences[0].items == a.sequences[0].items);
  CHECK(b.sequences[0].timestamps == a.sequences[0].timestamps);
  CHECK(serialize_corpus(b) == text);

  CHECK_THROWS_AS(deserialize_corpus("SEQREC2\n"), ParseError);
  auto broken = text.substr(0, text.size() - 5);
  try {
    deserialize_corpus(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.record() > 0);
  }
}
