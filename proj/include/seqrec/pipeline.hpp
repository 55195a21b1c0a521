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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "seqrec/corpus.hpp"
#include "seqrec/generate.hpp"
#include "seqrec/retrieval.hpp"
#include "seqrec/textify.hpp"

namespace seqrec {

enum class FusionPolicy {
  // Round r takes rank r of beam 1, beam 2, ..., skipping items already taken.
  kRankInterleave,
  // Item score is its best score over beams; score descending, ItemId ascending.
  kScoreMax,
};

FusionPolicy parse_fusion_policy(std::string_view name);
const char* fusion_policy_name(FusionPolicy policy) noexcept;

// Where a fused item came from. Beam and rank are 1-based.
struct Provenance {
  std::size_t beam = 0;
  std::size_t rank = 0;
  double score = 0.0;

  bool operator==(const Provenance&) const = default;
};

struct RecommendationList {
  std::string user;
  std::vector<ItemId> items;
  std::vector<Provenance> provenance;  // parallel to items
};

using ItemSet = std::unordered_set<ItemId, ItemIdHash>;

// Fuses per-beam ranked lists (beam order = preference order) into at most K
// distinct items. Items in `exclude` are skipped where they stand, so the
// remaining items keep their retrieval ranks and relative order.
RecommendationList merge_beams(std::span<const std::vector<Hit>> per_beam, std::size_t k,
                               FusionPolicy policy = FusionPolicy::kRankInterleave,
                               const ItemSet& exclude = {});

struct ExperimentConfig {
  std::string dataset;
  std::size_t k = 5;
  // Retrieval depth per beam; 0 means "same as k".
  std::size_t per_beam_depth = 0;
  FusionPolicy fusion = FusionPolicy::kRankInterleave;
  bool exclude_history = false;
  std::size_t token_budget = kDefaultTokenBudget;
  PromptTemplate tmpl{};
  // Users processed concurrently.
  std::size_t workers = 1;

  std::size_t depth() const noexcept { return per_beam_depth == 0 ? k : per_beam_depth; }
  // Throws ValidationError for k == 0 or workers == 0.
  void validate() const;
};

struct BeamTrace {
  std::string query;
  std::vector<ItemId> hit_items;
};

struct UserOutcome {
  std::string user;
  ItemId target;
  std::size_t sequence_length = 0;
  RecommendationList list;
  std::vector<BeamTrace> beams;
  std::vector<std::string> errors;

  // 1-based position of the target in the list, if present.
  std::optional<std::size_t> rank() const;
};

// serialize -> generate -> retrieve -> fuse for one test example. Generator,
// transport and prompt-budget failures are recorded in `errors` and yield an
// empty list; other failures propagate.
UserOutcome recommend_topk(const SplitExample& example, const ExperimentConfig& config,
                           const Catalog& catalog, const Retriever& retriever,
                           const Generator& generator);

struct ExperimentResult {
  std::vector<UserOutcome> outcomes;  // sorted by user id
  std::size_t failures = 0;           // users with at least one recorded error
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

ExperimentResult run_experiment(std::span<const SplitExample> tests,
                                const ExperimentConfig& config, const Catalog& catalog,
                                const Retriever& retriever, const Generator& generator,
                                const ProgressCallback& progress = {});

// Line-delimited result records:
// {user, target, seq_len, rank_or_miss, recommended, provenance, beams:[{query, hit_items}], errors}
std::string serialize_results(const ExperimentResult& result);

struct ResultRecord {
  std::string user;
  ItemId target;
  std::size_t sequence_length = 0;
  std::optional<std::size_t> rank;
  std::vector<ItemId> recommended;
  std::size_t error_count = 0;
};

// Throws ParseError naming the 1-based record number of a malformed line.
std::vector<ResultRecord> parse_results(std::string_view text, const std::string& source = "results");

}  // namespace seqrec
