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

#include <atomic>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "seqrec/dense.hpp"
#include "seqrec/errors.hpp"
#include "seqrec/lexical.hpp"
#include "seqrec/pipeline.hpp"
#include "support.hpp"

using namespace seqrec;
using seqrec::testing::fast_retry;
using seqrec::testing::make_item;
using seqrec::testing::StubServer;
using nlohmann::json;

namespace {

Hit hit(const std::string& id, double score = 1.0, std::size_t ordinal = 0) {
  return {ordinal, ItemId(id), score};
}

std::vector<std::string> ids(const RecommendationList& list) {
  std::vector<std::string> out;
  for (const auto& id : list.items) out.push_back(id.value);
  return out;
}

// 40 items whose titles share words in overlapping groups, and users whose
// histories walk through them.
struct World {
  std::vector<Item> items;
  Catalog catalog;
  std::vector<SplitExample> tests;

  static std::vector<Item> make_items() {
    const char* words[] = {"red", "blue", "silk", "wig", "scarf", "boots", "cream", "balm"};
    std::vector<Item> items;
    for (int i = 0; i < 40; ++i) {
      char id[8];
      std::snprintf(id, sizeof(id), "I%03d", i);
      std::string title = std::string(words[i % 8]) + " " + words[(i / 3) % 8] + " model " +
                          std::to_string(i);
      items.push_back(make_item(id, title));
    }
    return items;
  }

  World() : items(make_items()), catalog(items) {
    std::mt19937_64 rng(17);
    for (int u = 0; u < 30; ++u) {
      SplitExample ex;
      char user[8];
      std::snprintf(user, sizeof(user), "U%03d", u);
      ex.user = user;
      int n = 3 + static_cast<int>(rng() % 10);
      for (int i = 0; i < n - 1; ++i) ex.history.push_back(items[rng() % items.size()].id);
      ex.target = items[rng() % items.size()].id;
      ex.sequence_length = static_cast<std::size_t>(n);
      tests.push_back(ex);
    }
  }
};

}  // namespace

TEST_CASE("merge_beams: interleave examples") {
  std::vector<std::vector<Hit>> beams{{hit("A"), hit("B")}, {hit("A"), hit("C")}};
  // Round 1 yields A (beam 2's A is a duplicate); round 2 yields B then C.
  CHECK(ids(merge_beams(beams, 3)) == std::vector<std::string>{"A", "B", "C"});
  auto fused = merge_beams(beams, 3);
  CHECK(fused.provenance[1] == Provenance{1, 2, 1.0});
  CHECK(fused.provenance[2] == Provenance{2, 2, 1.0});

  std::vector<std::vector<Hit>> five{{hit("A")}, {hit("B")}, {hit("C")}, {hit("D")}, {hit("E")}};
  CHECK(ids(merge_beams(five, 5)) == std::vector<std::string>{"A", "B", "C", "D", "E"});

  std::vector<std::vector<Hit>> single{{hit("X"), hit("Y"), hit("Z")}};
  CHECK(ids(merge_beams(single, 2)) == std::vector<std::string>{"X", "Y"});

  std::vector<std::vector<Hit>> empty{{}, {}};
  CHECK(merge_beams(empty, 5).items.empty());
  CHECK(merge_beams({}, 5).items.empty());
  CHECK_THROWS_AS(merge_beams(single, 0), ValidationError);
}

TEST_CASE("merge_beams: score-max") {
  std::vector<std::vector<Hit>> beams{{hit("A", 2.0), hit("B", 1.0)}, {hit("C", 3.0), hit("B", 2.5)},
                                      {hit("D", 2.0)}};
  auto fused = merge_beams(beams, 4, FusionPolicy::kScoreMax);
  CHECK(ids(fused) == std::vector<std::string>{"C", "B", "A", "D"});
  CHECK(fused.provenance[1] == Provenance{2, 2, 2.5});
  CHECK(parse_fusion_policy("score-max") == FusionPolicy::kScoreMax);
  CHECK_THROWS_AS(parse_fusion_policy("rrf"), ValidationError);
}

TEST_CASE("merge_beams properties on random inputs") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::vector<Hit>> beams(1 + rng() % 6);
    std::vector<std::vector<std::string>> plain(beams.size());
    for (std::size_t b = 0; b < beams.size(); ++b) {
      std::set<std::string> used;
      for (int r = static_cast<int>(rng() % 8); r > 0; --r) {
        auto id = "I" + std::to_string(rng() % 15);
        if (!used.insert(id).second) continue;
        beams[b].push_back(hit(id, static_cast<double>(rng() % 5)));
        plain[b].push_back(id);
      }
    }
    const std::size_t k = 1 + rng() % 10;
    ItemSet exclude;
    for (int e = static_cast<int>(rng() % 3); e > 0; --e) exclude.insert(ItemId("I" + std::to_string(rng() % 15)));

    for (auto policy : {FusionPolicy::kRankInterleave, FusionPolicy::kScoreMax}) {
      auto list = merge_beams(beams, k, policy);
      std::set<std::string> distinct_in;
      for (const auto& b : plain) distinct_in.insert(b.begin(), b.end());
      auto out_ids = ids(list);
      CHECK(std::set<std::string>(out_ids.begin(), out_ids.end()).size() == out_ids.size());
      CHECK(out_ids.size() == std::min(k, distinct_in.size()));

      // Exclusion only removes items; survivors keep their relative order.
      auto filtered = ids(merge_beams(beams, k, policy, exclude));
      std::vector<std::string> expected;
      auto unbounded = ids(merge_beams(beams, 1000, policy));
      for (const auto& id : unbounded) {
        if (!exclude.contains(ItemId(id)) && expected.size() < k) expected.push_back(id);
      }
      CHECK(filtered == expected);
    }
    CHECK(ids(merge_beams(beams, k)) == oracle::interleave(plain, k));
  }
}

TEST_CASE("recommend_topk with LIS and lexical retrieval") {
  std::vector<Item> items{make_item("A", "red curly wig"), make_item("B", "blue silk scarf"),
                          make_item("C", "green leather boots")};
  Catalog cat(items);
  auto index = build_lexical_index(cat);
  LexicalRetriever retriever(index);
  LastItemGenerator lis;
  SplitExample ex{"u", {ItemId("A"), ItemId("B")}, ItemId("C"), SplitRole::kTest, 3};
  ExperimentConfig config;
  auto out = recommend_topk(ex, config, cat, retriever, lis);
  REQUIRE_FALSE(out.list.items.empty());
  CHECK(out.list.items[0] == ItemId("B"));
  REQUIRE(out.beams.size() == 1);
  CHECK(out.beams[0].query == "Title: blue silk scarf");
  // Every document shares the "title" token; A and C tie and ordinals decide.
  CHECK(out.list.items == std::vector<ItemId>{ItemId("B"), ItemId("A"), ItemId("C")});
  CHECK(out.rank() == 3u);

  config.exclude_history = true;
  auto excluded = recommend_topk(ex, config, cat, retriever, lis);
  CHECK(excluded.list.items == std::vector<ItemId>{ItemId("C")});
}

TEST_CASE("oracle generator with dense retrieval ranks the target first") {
  World w;
  HashMockProvider mock(128);
  auto index = build_dense_index(w.catalog, mock);
  DenseRetriever retriever(index, mock);
  OracleGenerator oracle;
  ExperimentConfig config;
  auto result = run_experiment(w.tests, config, w.catalog, retriever, oracle);
  for (const auto& o : result.outcomes) CHECK(o.rank() == 1u);
}

TEST_CASE("single-beam pipeline equals direct retrieval") {
  World w;
  auto index = build_lexical_index(w.catalog);
  LexicalRetriever retriever(index);
  LastItemGenerator lis;
  ExperimentConfig config;
  config.k = 7;
  for (const auto& ex : w.tests) {
    auto out = recommend_topk(ex, config, w.catalog, retriever, lis);
    auto direct = retriever.retrieve(render_item(w.catalog.at(ex.history.back())), config.k);
    REQUIRE(out.list.items.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      CHECK(out.list.items[i] == direct[i].id);
      CHECK(out.list.provenance[i].score == direct[i].score);
    }
  }
}

TEST_CASE("external generator with one beam matches last-item search bitwise") {
  World w;
  StubServer server;
  // Echoes the last history line of the prompt as the only beam.
  server.post("/generate", [](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    std::string prompt = body["prompt"];
    auto end = prompt.rfind("\n\nNext item:");
    auto start = prompt.rfind('\n', end - 1) + 1;
    json out{{"candidates", {{{"text", prompt.substr(start, end - start)}, {"score", 0.0}}}}};
    res.set_content(out.dump(), "application/json");
  });
  server.start();

  auto index = build_lexical_index(w.catalog);
  LexicalRetriever retriever(index);
  ExperimentConfig config;
  config.workers = 4;
  ExternalGenerator external({server.url(), 1, 50, fast_retry()});
  auto via_stub = run_experiment(w.tests, config, w.catalog, retriever, external);
  config.workers = 1;
  auto via_lis = run_experiment(w.tests, config, w.catalog, retriever, LastItemGenerator());
  CHECK(via_stub.failures == 0);
  CHECK(serialize_results(via_stub) == serialize_results(via_lis));
}

TEST_CASE("injected generator faults are isolated and counted") {
  World w;
  std::set<std::string> poisoned;
  for (std::size_t i = 0; i < w.tests.size(); i += 10) poisoned.insert(w.tests[i].user);
  // The stub cannot see user ids, so faults key on the exact prompt text.
  std::set<std::string> bad_prompts;
  for (const auto& ex : w.tests) {
    if (!poisoned.contains(ex.user)) continue;
    std::vector<const Item*> history;
    for (const auto& id : ex.history) history.push_back(&w.catalog.at(id));
    bad_prompts.insert(build_test_prompt(history).text);
  }
  StubServer server;
  server.post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    if (bad_prompts.contains(body["prompt"].get<std::string>())) {
      res.status = 500;
      return;
    }
    json out{{"candidates", {{{"text", "Title: red wig model 3"}, {"score", 0.0}}}}};
    res.set_content(out.dump(), "application/json");
  });
  server.start();

  auto index = build_lexical_index(w.catalog);
  LexicalRetriever retriever(index);
  ExperimentConfig config;
  config.workers = 3;
  ExternalGenerator external({server.url(), 5, 50, fast_retry(2)});
  auto result = run_experiment(w.tests, config, w.catalog, retriever, external);

  std::size_t affected = 0;
  for (const auto& ex : w.tests) {
    std::vector<const Item*> history;
    for (const auto& id : ex.history) history.push_back(&w.catalog.at(id));
    affected += bad_prompts.contains(build_test_prompt(history).text) ? 1 : 0;
  }
  CHECK(result.failures == affected);
  CHECK(result.failures >= poisoned.size());
  for (const auto& o : result.outcomes) {
    if (!o.errors.empty()) {
      CHECK(o.list.items.empty());
      CHECK(o.rank() == std::nullopt);
    } else {
      CHECK(o.list.items.size() == 5);
    }
  }
}

TEST_CASE("run_experiment is deterministic and sorted by user") {
  World w;
  auto index = build_lexical_index(w.catalog);
  LexicalRetriever retriever(index);
  LastItemGenerator lis;
  ExperimentConfig config;
  auto reversed = w.tests;
  std::reverse(reversed.begin(), reversed.end());
  std::size_t calls = 0;
  auto a = run_experiment(w.tests, config, w.catalog, retriever, lis,
                          [&](std::size_t, std::size_t) { ++calls; });
  config.workers = 4;
  auto b = run_experiment(reversed, config, w.catalog, retriever, lis);
  CHECK(calls == w.tests.size());
  CHECK(serialize_results(a) == serialize_results(b));
  for (std::size_t i = 1; i < a.outcomes.size(); ++i) CHECK(a.outcomes[i - 1].user < a.outcomes[i].user);
}

TEST_CASE("results round trip and malformed records") {
  World w;
  auto index = build_lexical_index(w.catalog);
  LexicalRetriever retriever(index);
  auto result = run_experiment(w.tests, ExperimentConfig{}, w.catalog, retriever, OracleGenerator());
  auto text = serialize_results(result);
  auto records = parse_results(text);
  REQUIRE(records.size() == w.tests.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].user == result.outcomes[i].user);
    CHECK(records[i].rank == result.outcomes[i].rank());
    CHECK(records[i].recommended == result.outcomes[i].list.items);
    CHECK(records[i].sequence_length == result.outcomes[i].sequence_length);
  }
  auto first_line = text.substr(0, text.find('\n') + 1);
  try {
    parse_results(first_line + first_line + "{\"user\": 3}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.record() == 3);
  }
  CHECK(parse_results("").empty());
}
