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

#include "seqrec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <fmt/core.h>

#include "seqrec/errors.hpp"

namespace seqrec {

using nlohmann::json;

FusionPolicy parse_fusion_policy(std::string_view name) {
  if (name == "rank-interleave") return FusionPolicy::kRankInterleave;
  if (name == "score-max") return FusionPolicy::kScoreMax;
  throw ValidationError(fmt::format("unknown fusion policy '{}'", name));
}

const char* fusion_policy_name(FusionPolicy policy) noexcept {
  return policy == FusionPolicy::kRankInterleave ? "rank-interleave" : "score-max";
}

RecommendationList merge_beams(std::span<const std::vector<Hit>> per_beam, std::size_t k,
                               FusionPolicy policy, const ItemSet& exclude) {
  if (k == 0) throw ValidationError("K must be at least 1");
  RecommendationList out;
  ItemSet taken = exclude;

  if (policy == FusionPolicy::kRankInterleave) {
    std::size_t depth = 0;
    for (const auto& beam : per_beam) depth = std::max(depth, beam.size());
    for (std::size_t rank = 0; rank < depth && out.items.size() < k; ++rank) {
      for (std::size_t beam = 0; beam < per_beam.size() && out.items.size() < k; ++beam) {
        if (rank >= per_beam[beam].size()) continue;
        const Hit& hit = per_beam[beam][rank];
        if (!taken.insert(hit.id).second) continue;
        out.items.push_back(hit.id);
        out.provenance.push_back({beam + 1, rank + 1, hit.score});
      }
    }
    return out;
  }

  // score-max: the first beam (then rank) attaining the maximum is recorded.
  std::map<ItemId, Provenance> best;
  for (std::size_t beam = 0; beam < per_beam.size(); ++beam) {
    for (std::size_t rank = 0; rank < per_beam[beam].size(); ++rank) {
      const Hit& hit = per_beam[beam][rank];
      if (exclude.contains(hit.id)) continue;
      auto [it, inserted] = best.try_emplace(hit.id, Provenance{beam + 1, rank + 1, hit.score});
      if (!inserted && hit.score > it->second.score) it->second = {beam + 1, rank + 1, hit.score};
    }
  }
  std::vector<std::pair<ItemId, Provenance>> ranked(best.begin(), best.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.score != b.second.score) return a.second.score > b.second.score;
    return a.first < b.first;
  });
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    out.items.push_back(ranked[i].first);
    out.provenance.push_back(ranked[i].second);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (k == 0) throw ValidationError("K must be at least 1");
  if (workers == 0) throw ValidationError("worker count must be at least 1");
}

std::optional<std::size_t> UserOutcome::rank() const {
  for (std::size_t i = 0; i < list.items.size(); ++i) {
    if (list.items[i] == target) return i + 1;
  }
  return std::nullopt;
}

UserOutcome recommend_topk(const SplitExample& example, const ExperimentConfig& config,
                           const Catalog& catalog, const Retriever& retriever,
                           const Generator& generator) {
  UserOutcome outcome;
  outcome.user = example.user;
  outcome.target = example.target;
  outcome.sequence_length = example.sequence_length;
  outcome.list.user = example.user;

  std::vector<const Item*> history;
  history.reserve(example.history.size());
  for (const auto& id : example.history) history.push_back(&catalog.at(id));

  CandidateSet candidates;
  try {
    std::optional<RenderedExample> prompt;
    if (generator.needs_prompt()) {
      prompt = build_test_prompt(history, config.token_budget, config.tmpl);
    }
    GenerationInput input{example.user, history, prompt ? &*prompt : nullptr,
                          catalog.find(example.target)};
    candidates = generator.generate(input);
  } catch (const GenerationError& e) {
    outcome.errors.emplace_back(e.what());
    return outcome;
  } catch (const TransportError& e) {
    outcome.errors.emplace_back(e.what());
    return outcome;
  } catch (const BudgetError& e) {
    outcome.errors.emplace_back(e.what());
    return outcome;
  }

  ItemSet seen_before;
  if (config.exclude_history) seen_before.insert(example.history.begin(), example.history.end());

  std::vector<std::vector<Hit>> per_beam;
  per_beam.reserve(candidates.candidates.size());
  for (const auto& candidate : candidates.candidates) {
    auto hits = retriever.retrieve(candidate.query, config.depth());
    BeamTrace trace{candidate.query, {}};
    for (const auto& h : hits) trace.hit_items.push_back(h.id);
    outcome.beams.push_back(std::move(trace));
    per_beam.push_back(std::move(hits));
  }
  outcome.list = merge_beams(per_beam, config.k, config.fusion, seen_before);
  outcome.list.user = example.user;
  return outcome;
}

ExperimentResult run_experiment(std::span<const SplitExample> tests,
                                const ExperimentConfig& config, const Catalog& catalog,
                                const Retriever& retriever, const Generator& generator,
                                const ProgressCallback& progress) {
  config.validate();
  ExperimentResult result;
  result.outcomes.resize(tests.size());

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tests.size();) {
      try {
        result.outcomes[i] = recommend_topk(tests[i], config, catalog, retriever, generator);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tests.size());
        return;
      }
      auto finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, tests.size());
      }
    }
  };

  const std::size_t threads = std::min(config.workers, std::max<std::size_t>(1, tests.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(result.outcomes.begin(), result.outcomes.end(),
            [](const UserOutcome& a, const UserOutcome& b) { return a.user < b.user; });
  for (const auto& o : result.outcomes) {
    if (!o.errors.empty()) ++result.failures;
  }
  return result;
}

namespace {

json ids_json(const std::vector<ItemId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.value);
  return out;
}

}  // namespace

std::string serialize_results(const ExperimentResult& result) {
  std::string out;
  for (const auto& o : result.outcomes) {
    json beams = json::array();
    for (const auto& b : o.beams) beams.push_back({{"query", b.query}, {"hit_items", ids_json(b.hit_items)}});
    json provenance = json::array();
    for (const auto& p : o.list.provenance) {
      provenance.push_back({{"beam", p.beam}, {"rank", p.rank}, {"score", p.score}});
    }
    auto rank = o.rank();
    json record{{"user", o.user},
                {"target", o.target.value},
                {"seq_len", o.sequence_length},
                {"rank_or_miss", rank ? json(*rank) : json("miss")},
                {"recommended", ids_json(o.list.items)},
                {"provenance", provenance},
                {"beams", beams},
                {"errors", o.errors}};
    out += record.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<ResultRecord> parse_results(std::string_view text, const std::string& source) {
  std::vector<ResultRecord> records;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    start = nl + 1;
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto fail = [&](const std::string& why) {
      return ParseError(fmt::format("{}: record {}: {}", source, number, why), number);
    };
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded() || !value.is_object()) throw fail("not a JSON object");
    try {
      ResultRecord r;
      r.user = value.at("user").get<std::string>();
      r.target = ItemId(value.at("target").get<std::string>());
      r.sequence_length = value.at("seq_len").get<std::size_t>();
      const auto& rank = value.at("rank_or_miss");
      if (rank.is_string()) {
        if (rank.get<std::string>() != "miss") throw fail("rank_or_miss must be a rank or \"miss\"");
      } else {
        auto v = rank.get<std::int64_t>();
        if (v < 1) throw fail("rank must be >= 1");
        r.rank = static_cast<std::size_t>(v);
      }
      for (const auto& id : value.at("recommended")) r.recommended.emplace_back(id.get<std::string>());
      r.error_count = value.at("errors").size();
      if (r.rank && *r.rank > r.recommended.size()) throw fail("rank beyond recommendation list");
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
  }
  return records;
}

}  // namespace seqrec
