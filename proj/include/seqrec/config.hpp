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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "seqrec/corpus.hpp"
#include "seqrec/lexical.hpp"
#include "seqrec/pipeline.hpp"
#include "seqrec/textify.hpp"

namespace seqrec {

// Effective configuration for one invocation: defaults, then the JSON config
// file, then command-line overrides. Keys may be nested objects or flat
// dotted names ("template.header").
struct RunConfig {
  // Paths as written (relative ones resolve against base_dir).
  std::string reviews_path;
  std::string metadata_path;
  std::string index_path;    // empty: default under the work dir
  std::string results_path;  // empty: default under the work dir
  std::filesystem::path base_dir = ".";
  std::filesystem::path work_dir = "work";

  std::string dataset;
  FieldAliases aliases;
  std::size_t kcore = 5;
  bool kcore_refilter = false;

  PromptTemplate tmpl;
  std::size_t token_budget = kDefaultTokenBudget;

  std::string generator = "lis";      // lis | oracle | external
  std::string retriever = "lexical";  // lexical | dense
  Bm25Params bm25;

  std::string dense_provider = "mock";  // mock | file | http
  std::string dense_model = "e5-small-v2";
  std::string dense_table;  // precomputed SREMB1 table for the file provider
  std::size_t dense_dimension = kDefaultEmbeddingDim;
  bool dense_normalize = true;
  std::size_t dense_batch_size = 64;
  std::size_t dense_in_flight = 4;

  std::size_t k = 5;
  std::size_t beams = 5;
  std::size_t per_beam_depth = 0;  // 0: same as k
  std::size_t max_new_tokens = 50;
  FusionPolicy fusion = FusionPolicy::kRankInterleave;
  bool exclude_history = false;
  std::size_t workers = 8;

  SegmentThresholds thresholds;
  bool upper_threshold_set = false;

  std::string sidecar_url;
  int retry_attempts = 3;
  std::size_t retry_backoff_ms = 500;

  std::optional<std::uint64_t> seed;
  // Reference fine-tuning recipe; recorded in manifests, never used here.
  nlohmann::json sidecar_recipe;

  // Merges one JSON object into this config. Unknown keys are rejected.
  void apply(const nlohmann::json& values);

  std::filesystem::path resolve(const std::string& path) const;
  std::filesystem::path corpus_file() const { return work_dir / "corpus.seqrec"; }
  std::filesystem::path lexical_index_file() const;
  std::filesystem::path dense_index_file() const;
  std::filesystem::path run_dir() const;
  std::filesystem::path results_file() const;

  // Fills dataset-dependent defaults (the upper segment threshold) and checks
  // ranges. Throws ValidationError.
  void finalize();

  // Everything that affects results. Excludes the work dir so that moving a
  // run does not change its hash.
  nlohmann::json effective() const;
  std::string hash() const;
};

// Upper segment threshold used for the three Amazon categories.
std::optional<std::size_t> default_upper_threshold(const std::string& dataset);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace seqrec
