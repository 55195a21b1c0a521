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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqrec/corpus.hpp"
#include "seqrec/pipeline.hpp"

namespace seqrec {

// Leave-last-out outcome for one user: a single relevant item.
struct RankOutcome {
  std::string user;
  ItemId target;
  std::optional<std::size_t> rank;  // 1-based; nullopt for a miss
  std::size_t sequence_length = 0;  // full n, used for segmentation
};

std::vector<RankOutcome> outcomes_from_records(std::span<const ResultRecord> records);

// Mean of 1{rank <= k}. Throws EvalError for empty input.
double recall_at_k(std::span<const RankOutcome> outcomes, std::size_t k);
// Mean of 1/log2(rank + 1) for rank <= k, else 0 (ideal DCG is 1).
double ndcg_at_k(std::span<const RankOutcome> outcomes, std::size_t k);

struct SegmentSlice {
  Segment segment = Segment::kColdStart;
  std::size_t users = 0;
  double share_percent = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::string model;
  std::string config_hash;
  std::size_t k = 5;
  SegmentThresholds thresholds;
  std::size_t users = 0;
  double recall = 0.0;
  double ndcg = 0.0;
  std::array<SegmentSlice, 3> segments{};
};

// Overall and per-segment Recall@k / NDCG@k. Throws EvalError for empty input
// or if NDCG@k exceeds Recall@k anywhere.
EvalReport segment_report(std::span<const RankOutcome> outcomes, const SegmentThresholds& thresholds,
                          std::size_t k = 5);

// Fixed-width table, metrics to four decimals.
std::string format_report(const EvalReport& report);

// {dataset: {model: {"Recall@k": {overall, cold_start, regular, power}, "NDCG@k": {...},
//  "users": {...}, "share_percent": {...}}}}
nlohmann::json report_json(const EvalReport& report);

}  // namespace seqrec
