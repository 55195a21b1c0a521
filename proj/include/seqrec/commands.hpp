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

#include <filesystem>
#include <iosfwd>
#include <memory>

#include "seqrec/config.hpp"
#include "seqrec/corpus.hpp"
#include "seqrec/embedding.hpp"
#include "seqrec/eval.hpp"
#include "seqrec/generate.hpp"

namespace seqrec {

// The four CLI subcommands. Each takes a finalized RunConfig, writes its
// artifacts under the work dir, and prints a summary to `out`.

struct IngestSummary {
  ParseReport reviews;
  ParseReport metadata;
  SequenceBuildReport sequences;
  std::size_t kcore_user_violations = 0;
  std::size_t kcore_item_violations = 0;
  DatasetStats stats;
  std::filesystem::path artifact;
};

IngestSummary cmd_ingest(const RunConfig& config, std::ostream& out);

enum class IndexKind { kLexical, kDense };

IndexKind parse_index_kind(const std::string& name);

// Dense builds interrupted by a provider failure leave `<index>.partial`,
// which the next invocation resumes from.
std::filesystem::path cmd_index(const RunConfig& config, IndexKind kind, std::ostream& out);

std::filesystem::path cmd_run(const RunConfig& config, std::ostream& out, std::ostream& progress);

EvalReport cmd_report(const RunConfig& config, const std::filesystem::path& results,
                      std::ostream& out);

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& config);
std::unique_ptr<Generator> make_generator(const RunConfig& config);

// "1234567" -> "1,234,567".
std::string group_thousands(std::size_t value);

std::string format_stats_table(const std::string& dataset, const DatasetStats& stats);

}  // namespace seqrec
