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

#include "seqrec/eval.hpp"

#include <cmath>

#include <fmt/core.h>

#include "seqrec/errors.hpp"

namespace seqrec {

std::vector<RankOutcome> outcomes_from_records(std::span<const ResultRecord> records) {
  std::vector<RankOutcome> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.user, r.target, r.rank, r.sequence_length});
  return out;
}

namespace {

double recall_gain(const RankOutcome& o, std::size_t k) {
  return (o.rank && *o.rank <= k) ? 1.0 : 0.0;
}

double ndcg_gain(const RankOutcome& o, std::size_t k) {
  if (!o.rank || *o.rank > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(*o.rank) + 1.0);
}

template <typename Gain>
double mean_gain(std::span<const RankOutcome> outcomes, std::size_t k, Gain gain) {
  if (outcomes.empty()) throw EvalError("no outcomes to evaluate");
  if (k == 0) throw EvalError("cutoff k must be at least 1");
  double total = 0;
  for (const auto& o : outcomes) {
    if (o.rank && *o.rank == 0) throw EvalError("ranks are 1-based");
    total += gain(o, k);
  }
  return total / static_cast<double>(outcomes.size());
}

}  // namespace

double recall_at_k(std::span<const RankOutcome> outcomes, std::size_t k) {
  return mean_gain(outcomes, k, recall_gain);
}

double ndcg_at_k(std::span<const RankOutcome> outcomes, std::size_t k) {
  return mean_gain(outcomes, k, ndcg_gain);
}

EvalReport segment_report(std::span<const RankOutcome> outcomes,
                          const SegmentThresholds& thresholds, std::size_t k) {
  thresholds.validate();
  EvalReport report;
  report.k = k;
  report.thresholds = thresholds;
  report.users = outcomes.size();
  report.recall = recall_at_k(outcomes, k);
  report.ndcg = ndcg_at_k(outcomes, k);

  std::array<std::vector<RankOutcome>, 3> buckets;
  for (const auto& o : outcomes) {
    buckets[static_cast<std::size_t>(assign_segment(o.sequence_length, thresholds))].push_back(o);
  }
  for (std::size_t s = 0; s < buckets.size(); ++s) {
    auto& slice = report.segments[s];
    slice.segment = static_cast<Segment>(s);
    slice.users = buckets[s].size();
    slice.share_percent =
        100.0 * static_cast<double>(slice.users) / static_cast<double>(report.users);
    if (!buckets[s].empty()) {
      slice.recall = recall_at_k(buckets[s], k);
      slice.ndcg = ndcg_at_k(buckets[s], k);
    }
    if (slice.ndcg > slice.recall) {
      throw EvalError(fmt::format("NDCG@{} exceeds Recall@{} in segment {}", k, k,
                                  segment_name(slice.segment)));
    }
  }
  if (report.ndcg > report.recall) throw EvalError("NDCG exceeds Recall overall");
  return report;
}

std::string format_report(const EvalReport& r) {
  std::string out;
  out += fmt::format("dataset: {}  model: {}  users: {}  thresholds: l={} h={}\n",
                     r.dataset.empty() ? "-" : r.dataset, r.model.empty() ? "-" : r.model, r.users,
                     r.thresholds.lower, r.thresholds.upper);
  out += fmt::format("{:<12} {:>8} {:>9} {:>10} {:>10}\n", "segment", "users", "share(%)",
                     fmt::format("Recall@{}", r.k), fmt::format("NDCG@{}", r.k));
  out += fmt::format("{:<12} {:>8} {:>9.2f} {:>10.4f} {:>10.4f}\n", "overall", r.users, 100.0,
                     r.recall, r.ndcg);
  for (const auto& s : r.segments) {
    out += fmt::format("{:<12} {:>8} {:>9.2f} {:>10.4f} {:>10.4f}\n", segment_name(s.segment),
                       s.users, s.share_percent, s.recall, s.ndcg);
  }
  return out;
}

nlohmann::json report_json(const EvalReport& r) {
  const std::string recall_key = fmt::format("Recall@{}", r.k);
  const std::string ndcg_key = fmt::format("NDCG@{}", r.k);
  nlohmann::json model;
  model[recall_key]["overall"] = r.recall;
  model[ndcg_key]["overall"] = r.ndcg;
  model["users"]["overall"] = r.users;
  model["share_percent"]["overall"] = 100.0;
  for (const auto& s : r.segments) {
    const char* name = segment_name(s.segment);
    model[recall_key][name] = s.recall;
    model[ndcg_key][name] = s.ndcg;
    model["users"][name] = s.users;
    model["share_percent"][name] = s.share_percent;
  }
  model["thresholds"] = {{"l", r.thresholds.lower}, {"h", r.thresholds.upper}};
  if (!r.config_hash.empty()) model["config_hash"] = r.config_hash;
  nlohmann::json out;
  out[r.dataset.empty() ? "unknown" : r.dataset][r.model.empty() ? "unknown" : r.model] = model;
  return out;
}

}  // namespace seqrec
