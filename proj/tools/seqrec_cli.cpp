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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "seqrec/commands.hpp"
#include "seqrec/errors.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> dataset;
  std::optional<std::string> generator;
  std::optional<std::string> retriever;
  std::optional<std::size_t> k;
  std::optional<std::size_t> beams;
  std::optional<std::size_t> per_beam_depth;
  std::optional<std::string> fusion;
  bool exclude_history = false;
  std::optional<std::string> sidecar_url;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> work_dir;
  std::optional<std::size_t> workers;
};

seqrec::RunConfig build_config(const Overrides& o) {
  seqrec::RunConfig config;
  if (!o.config.empty()) config = seqrec::load_config(o.config);
  if (o.dataset) config.dataset = *o.dataset;
  if (o.generator) config.generator = *o.generator;
  if (o.retriever) config.retriever = *o.retriever;
  if (o.k) config.k = *o.k;
  if (o.beams) config.beams = *o.beams;
  if (o.per_beam_depth) config.per_beam_depth = *o.per_beam_depth;
  if (o.fusion) config.fusion = seqrec::parse_fusion_policy(*o.fusion);
  if (o.exclude_history) config.exclude_history = true;
  if (o.sidecar_url) config.sidecar_url = *o.sidecar_url;
  if (o.seed) config.seed = *o.seed;
  if (o.work_dir) config.work_dir = *o.work_dir;
  if (o.workers) config.workers = *o.workers;
  config.finalize();
  return config;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON config file");
  cmd->add_option("--dataset", o.dataset, "dataset name (beauty, toys, sports, ...)");
  cmd->add_option("--work-dir", o.work_dir, "directory for artifacts");
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--generator", o.generator, "lis | oracle | external");
  cmd->add_option("--retriever", o.retriever, "lexical | dense");
  cmd->add_option("--k", o.k, "recommendation list length");
  cmd->add_option("--beams", o.beams, "beam width for the external generator");
  cmd->add_option("--per-beam-depth", o.per_beam_depth, "hits retrieved per beam (default k)");
  cmd->add_option("--fusion", o.fusion, "rank-interleave | score-max");
  cmd->add_flag("--exclude-history", o.exclude_history, "drop history items from the list");
  cmd->add_option("--sidecar-url", o.sidecar_url, "base URL of the model sidecar");
  cmd->add_option("--seed", o.seed, "seed recorded in the manifest");
  cmd->add_option("--workers", o.workers, "concurrent users for the external generator");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generative sequential recommendation via retrieval over item titles"};
  app.require_subcommand(1);
  Overrides o;
  std::string index_kind;
  std::string results;

  auto* ingest = app.add_subcommand("ingest", "parse the raw dumps into a corpus artifact");
  add_common(ingest, o);

  auto* index = app.add_subcommand("index", "build a lexical or dense item index");
  add_common(index, o);
  index->add_option("kind", index_kind, "lexical | dense")
      ->required()
      ->check(CLI::IsMember({"lexical", "dense"}));
  index->add_option("--retriever", o.retriever, "unused; accepted for symmetry");

  auto* run = app.add_subcommand("run", "generate, retrieve and write per-user results");
  add_common(run, o);
  add_run_options(run, o);

  auto* report = app.add_subcommand("report", "compute Recall@k and NDCG@k by segment");
  add_common(report, o);
  add_run_options(report, o);
  report->add_option("--results", results, "results.jsonl (default: the run directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    auto config = build_config(o);
    if (ingest->parsed()) {
      seqrec::cmd_ingest(config, std::cout);
    } else if (index->parsed()) {
      seqrec::cmd_index(config, seqrec::parse_index_kind(index_kind), std::cout);
    } else if (run->parsed()) {
      seqrec::cmd_run(config, std::cout, std::cerr);
    } else {
      seqrec::cmd_report(config, results.empty() ? config.results_file() : config.resolve(results),
                         std::cout);
    }
  } catch (const seqrec::Error& e) {
    std::cerr << "error [" << seqrec::category_name(e.category()) << "]: " << e.what() << "\n";
    return seqrec::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
