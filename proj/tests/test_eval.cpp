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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "seqrec/errors.hpp"
#include "seqrec/eval.hpp"

using namespace seqrec;

namespace {

RankOutcome outcome(std::optional<std::size_t> rank, std::size_t n = 6) {
  return {"u", ItemId("T"), rank, n};
}

}  // namespace

TEST_CASE("closed-form recall and ndcg") {
  std::vector<RankOutcome> r1{outcome(1)};
  CHECK(recall_at_k(r1, 5) == 1.0);
  CHECK(ndcg_at_k(r1, 5) == 1.0);
  std::vector<RankOutcome> r3{outcome(3)};
  CHECK(ndcg_at_k(r3, 5) == 0.5);
  std::vector<RankOutcome> miss{outcome(std::nullopt)};
  CHECK(recall_at_k(miss, 5) == 0.0);
  CHECK(ndcg_at_k(miss, 5) == 0.0);
  std::vector<RankOutcome> r6{outcome(6)};
  CHECK(ndcg_at_k(r6, 5) == 0.0);
  CHECK(recall_at_k(r6, 5) == 0.0);
  std::vector<RankOutcome> mixed{outcome(1), outcome(std::nullopt), outcome(std::nullopt),
                                 outcome(std::nullopt)};
  CHECK(recall_at_k(mixed, 5) == 0.25);
  CHECK_THROWS_AS(recall_at_k({}, 5), EvalError);
  CHECK_THROWS_AS(ndcg_at_k({}, 5), EvalError);
  std::vector<RankOutcome> zero{outcome(0)};
  CHECK_THROWS_AS(recall_at_k(zero, 5), EvalError);
}

TEST_CASE("every rank position against the closed form") {
  for (std::size_t rank = 1; rank <= 10; ++rank) {
    std::vector<RankOutcome> one{outcome(rank)};
    CHECK(ndcg_at_k(one, 5) == doctest::Approx(oracle::ndcg_gain(rank, 5)).epsilon(1e-15));
    CHECK(recall_at_k(one, 5) == (rank <= 5 ? 1.0 : 0.0));
  }
}

TEST_CASE("segment report on a constructed fixture") {
  // Cold users (n <= 5) always hit at rank 1; everyone else misses.
  std::vector<RankOutcome> outs;
  for (std::size_t n : {3, 4, 5, 5}) outs.push_back(outcome(1, n));
  for (std::size_t n : {6, 9, 14, 15, 20, 30}) outs.push_back(outcome(std::nullopt, n));
  auto r = segment_report(outs, {5, 14}, 5);
  const auto& cold = r.segments[0];
  const auto& regular = r.segments[1];
  const auto& power = r.segments[2];
  CHECK(cold.users == 4);
  CHECK(regular.users == 3);
  CHECK(power.users == 3);
  CHECK(cold.recall == 1.0);
  CHECK(regular.recall == 0.0);
  CHECK(power.recall == 0.0);
  CHECK(cold.share_percent == doctest::Approx(40.0));
  CHECK(r.recall == doctest::Approx(0.4));
  CHECK(r.ndcg == doctest::Approx(0.4));
}

TEST_CASE("all users in one segment") {
  std::vector<RankOutcome> outs{outcome(2, 1), outcome(std::nullopt, 1), outcome(4, 1)};
  auto r = segment_report(outs, {5, 14});
  CHECK(r.segments[0].users == 3);
  CHECK(r.segments[0].recall == r.recall);
  CHECK(r.segments[0].ndcg == r.ndcg);
  CHECK(r.segments[1].users == 0);
  CHECK(r.segments[1].recall == 0.0);
}

TEST_CASE("weighted-mean consistency, k monotonicity and ndcg <= recall") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RankOutcome> outs;
    for (int u = static_cast<int>(1 + rng() % 60); u > 0; --u) {
      std::optional<std::size_t> rank;
      if (rng() % 3) rank = 1 + rng() % 20;
      outs.push_back(outcome(rank, 1 + rng() % 30));
    }
    SegmentThresholds t{1 + rng() % 8, 0};
    t.upper = t.lower + 1 + rng() % 10;
    const std::size_t k = 1 + rng() % 20;
    auto r = segment_report(outs, t, k);
    double recall = 0, ndcg = 0;
    std::size_t users = 0;
    for (const auto& s : r.segments) {
      recall += s.recall * static_cast<double>(s.users);
      ndcg += s.ndcg * static_cast<double>(s.users);
      users += s.users;
      CHECK(s.ndcg <= s.recall);
    }
    CHECK(users == outs.size());
    CHECK(std::fabs(recall / static_cast<double>(users) - r.recall) <= 1e-12);
    CHECK(std::fabs(ndcg / static_cast<double>(users) - r.ndcg) <= 1e-12);
    CHECK(r.ndcg <= r.recall);
    CHECK(recall_at_k(outs, k) <= recall_at_k(outs, k + 1));
    CHECK(ndcg_at_k(outs, k) <= ndcg_at_k(outs, k + 1));
  }
}

TEST_CASE("report rendering") {
  std::vector<RankOutcome> outs{outcome(1, 3), outcome(3, 10), outcome(std::nullopt, 20)};
  auto r = segment_report(outs, {5, 14});
  r.dataset = "beauty";
  r.model = "lis-bm25";
  r.config_hash = "abc";
  auto text = format_report(r);
  CHECK(text.find("overall") != std::string::npos);
  CHECK(text.find("0.6667") != std::string::npos);
  CHECK(text.find("0.5000") != std::string::npos);
  auto j = report_json(r);
  CHECK(j["beauty"]["lis-bm25"]["Recall@5"]["overall"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(j["beauty"]["lis-bm25"]["NDCG@5"]["regular"].get<double>() == doctest::Approx(0.5));
  CHECK(j["beauty"]["lis-bm25"]["users"]["power"] == 1);
  CHECK(j["beauty"]["lis-bm25"]["config_hash"] == "abc");
}
