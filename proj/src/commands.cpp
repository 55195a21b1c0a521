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

#include "seqrec/commands.hpp"

#include <fstream>
#include <ostream>

#include <fmt/core.h>

#include "seqrec/binary_io.hpp"
#include "seqrec/dense.hpp"
#include "seqrec/errors.hpp"
#include "seqrec/http_client.hpp"
#include "seqrec/lexical.hpp"
#include "seqrec/pipeline.hpp"

namespace seqrec {

using nlohmann::json;

std::string group_thousands(std::size_t value) {
  std::string digits = std::to_string(value);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string format_stats_table(const std::string& dataset, const DatasetStats& stats) {
  return fmt::format("{:<10} {:>10} {:>10} {:>14} {:>10}\n{:<10} {:>10} {:>10} {:>14} {:>10.2f}\n",
                     "dataset", "#users", "#items", "#interactions", "mean_len",
                     dataset.empty() ? "-" : dataset, group_thousands(stats.num_users),
                     group_thousands(stats.num_items), group_thousands(stats.num_interactions),
                     stats.mean_seq_length);
}

namespace {

void require_file(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ValidationError(fmt::format("{} not found: {}", what, path.string()));
  }
}

std::string file_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char buf[6] = {};
  in.read(buf, sizeof(buf));
  return std::string(buf, static_cast<std::size_t>(in.gcount()));
}

RetryPolicy retry_policy(const RunConfig& config) {
  RetryPolicy retry;
  retry.attempts = config.retry_attempts;
  retry.initial_backoff = std::chrono::milliseconds(config.retry_backoff_ms);
  return retry;
}

ExperimentConfig experiment_config(const RunConfig& config) {
  ExperimentConfig exp;
  exp.dataset = config.dataset;
  exp.k = config.k;
  exp.per_beam_depth = config.per_beam_depth;
  exp.fusion = config.fusion;
  exp.exclude_history = config.exclude_history;
  exp.token_budget = config.token_budget;
  exp.tmpl = config.tmpl;
  exp.workers = config.generator == "external" ? config.workers : 1;
  return exp;
}

void check_lexical_alignment(const LexicalIndex& index, const Catalog& catalog) {
  if (index.num_docs() != catalog.size()) {
    throw ValidationError(fmt::format("lexical index has {} documents but the catalog has {} items",
                                      index.num_docs(), catalog.size()));
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (index.doc_id(i) != catalog.at_ordinal(i).id) {
      throw ValidationError("lexical index was built from a different catalog");
    }
  }
}

std::filesystem::path partial_path(const std::filesystem::path& index) {
  auto p = index;
  p += ".partial";
  return p;
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& config) {
  if (config.dense_provider == "mock") {
    return std::make_unique<HashMockProvider>(config.dense_dimension);
  }
  if (config.dense_provider == "file") {
    if (config.dense_table.empty()) throw ValidationError("dense.provider=file needs dense.table");
    auto path = config.resolve(config.dense_table);
    require_file(path, "precomputed embedding table");
    auto table = load_embedding_table(path);
    if (table.dimension() != config.dense_dimension) {
      throw ContractError(fmt::format("{} has dimension {}, config expects {}", path.string(),
                                      table.dimension(), config.dense_dimension));
    }
    return std::make_unique<PrecomputedProvider>(std::move(table));
  }
  if (config.sidecar_url.empty()) throw ValidationError("dense.provider=http needs sidecar_url");
  return std::make_unique<HttpEmbeddingProvider>(config.sidecar_url, config.dense_model,
                                                 config.dense_dimension, retry_policy(config));
}

std::unique_ptr<Generator> make_generator(const RunConfig& config) {
  if (config.generator == "lis") return std::make_unique<LastItemGenerator>(config.tmpl);
  if (config.generator == "oracle") return std::make_unique<OracleGenerator>(config.tmpl);
  if (config.sidecar_url.empty()) throw ValidationError("--generator external needs --sidecar-url");
  ExternalGeneratorOptions options;
  options.base_url = config.sidecar_url;
  options.beams = config.beams;
  options.max_new_tokens = config.max_new_tokens;
  options.retry = retry_policy(config);
  return std::make_unique<ExternalGenerator>(std::move(options));
}

IndexKind parse_index_kind(const std::string& name) {
  if (name == "lexical") return IndexKind::kLexical;
  if (name == "dense") return IndexKind::kDense;
  throw ValidationError(fmt::format("unknown index kind '{}'", name));
}

// ---------------------------------------------------------------------------

IngestSummary cmd_ingest(const RunConfig& config, std::ostream& out) {
  if (config.reviews_path.empty()) throw ValidationError("paths.reviews is not set");
  if (config.metadata_path.empty()) throw ValidationError("paths.metadata is not set");
  const auto reviews_file = config.resolve(config.reviews_path);
  const auto metadata_file = config.resolve(config.metadata_path);
  require_file(reviews_file, "reviews file");
  require_file(metadata_file, "metadata file");

  IngestSummary summary;
  auto metadata = parse_metadata_file(metadata_file, config.aliases);
  summary.metadata = metadata.report;
  auto reviews = parse_reviews_file(reviews_file, config.aliases);
  summary.reviews = reviews.report;

  Catalog full(std::move(metadata.records));
  auto built = build_sequences(reviews.records, full);
  summary.sequences = built.report;

  auto kcore = validate_kcore(built.sequences, config.kcore,
                              config.kcore_refilter ? KcoreMode::kRefilter : KcoreMode::kValidateOnly);
  summary.kcore_user_violations = kcore.user_violations.size();
  summary.kcore_item_violations = kcore.item_violations.size();
  std::vector<UserSequence> sequences =
      kcore.filtered ? std::move(*kcore.filtered) : std::move(built.sequences);
  if (kcore.filtered) {
    std::erase_if(sequences, [](const UserSequence& s) { return s.length() < kMinSequenceLength; });
  }
  summary.stats = compute_stats(sequences);
  Catalog catalog = restrict_catalog(full, sequences);

  CorpusArtifact artifact{config.dataset, catalog.items(), std::move(sequences)};
  summary.artifact = config.corpus_file();
  write_corpus(summary.artifact, artifact);

  out << fmt::format("reviews:   {} records, {} unparseable\n", summary.reviews.lines,
                     summary.reviews.bad_lines);
  out << fmt::format("metadata:  {} records, {} unparseable, {} without title, {} duplicate ids\n",
                     summary.metadata.lines, summary.metadata.bad_lines, summary.metadata.excluded,
                     summary.metadata.duplicates);
  out << fmt::format(
      "sequences: dropped {} interactions on excluded or unknown items, {} users below {} "
      "interactions\n",
      summary.sequences.dropped_unknown_item, summary.sequences.dropped_short_users,
      kMinSequenceLength);
  out << fmt::format("{}-core:    {} users and {} items below threshold{}\n", config.kcore,
                     summary.kcore_user_violations, summary.kcore_item_violations,
                     config.kcore_refilter ? " (re-filtered)" : " (validate only)");
  out << format_stats_table(config.dataset, summary.stats);
  out << fmt::format("wrote {}\n", summary.artifact.string());
  return summary;
}

std::filesystem::path cmd_index(const RunConfig& config, IndexKind kind, std::ostream& out) {
  require_file(config.corpus_file(), "corpus artifact (run ingest first)");
  auto corpus = read_corpus(config.corpus_file());
  Catalog catalog(std::move(corpus.items));

  if (kind == IndexKind::kLexical) {
    auto index = build_lexical_index(catalog, config.bm25, config.tmpl);
    auto path = config.lexical_index_file();
    save_lexical_index(path, index);
    out << fmt::format("lexical index: N={} terms={} avgdl={:.4f} k1={} b={}\n", index.num_docs(),
                       index.num_terms(), index.avgdl(), config.bm25.k1, config.bm25.b);
    out << fmt::format("wrote {}\n", path.string());
    return path;
  }

  auto provider = make_provider(config);
  auto path = config.dense_index_file();
  const auto partial = partial_path(path);
  const auto contract = provider->contract();

  std::optional<DenseCheckpoint> resume;
  if (std::filesystem::exists(partial)) {
    auto table = load_embedding_table(partial);
    bool prefix = table.provider_name == contract.name && table.dimension() == contract.dimension &&
                  table.size() <= catalog.size();
    for (std::size_t i = 0; prefix && i < table.size(); ++i) {
      prefix = table.keys[i] == catalog.at_ordinal(i).id.value;
    }
    if (prefix) {
      DenseCheckpoint cp{contract.name, table.size(),
                         EmbeddingMatrix::Zero(static_cast<Eigen::Index>(catalog.size()),
                                               static_cast<Eigen::Index>(contract.dimension))};
      cp.rows.topRows(table.rows.rows()) = table.rows;
      out << fmt::format("resuming dense build at row {}\n", cp.completed_rows);
      resume = std::move(cp);
    }
  }

  DenseBuildOptions options;
  options.batch_size = config.dense_batch_size;
  options.max_in_flight = config.dense_in_flight;
  options.normalize = config.dense_normalize;
  try {
    auto index = build_dense_index(catalog, *provider, options, resume ? &*resume : nullptr,
                                   config.tmpl);
    save_dense_index(path, index);
    std::filesystem::remove(partial);
    out << fmt::format("dense index: rows={} d={} provider={} fingerprint={}\n", index.size(),
                       index.dimension(), index.provider_name(), hex64(index.fingerprint()));
    out << fmt::format("wrote {}\n", path.string());
  } catch (const DenseBuildError& e) {
    const auto& cp = e.checkpoint();
    EmbeddingTable table;
    table.provider_name = cp.provider_name;
    table.rows = cp.rows.topRows(static_cast<Eigen::Index>(cp.completed_rows));
    for (std::size_t i = 0; i < cp.completed_rows; ++i) {
      table.keys.push_back(catalog.at_ordinal(i).id.value);
    }
    save_embedding_table(partial, table);
    throw;
  }
  return path;
}

std::filesystem::path cmd_run(const RunConfig& config, std::ostream& out, std::ostream& progress) {
  require_file(config.corpus_file(), "corpus artifact (run ingest first)");
  const bool dense = config.retriever == "dense";
  const auto index_file = dense ? config.dense_index_file() : config.lexical_index_file();
  require_file(index_file, "index (run index first)");
  const auto magic = file_magic(index_file);
  if (magic != (dense ? "SREMB1" : "SRLEX1")) {
    throw ValidationError(fmt::format("--retriever {} conflicts with index {} (magic '{}')",
                                      config.retriever, index_file.string(), magic));
  }
  // Build the generator before any user is processed so configuration
  // problems surface at startup.
  auto generator = make_generator(config);
  nlohmann::json sidecar;
  if (config.generator == "external" || (dense && config.dense_provider == "http")) {
    sidecar = sidecar_health(config.sidecar_url, retry_policy(config));
  }

  auto corpus = read_corpus(config.corpus_file());
  Catalog catalog(std::move(corpus.items));
  auto splits = leave_last_out_split(corpus.sequences);

  std::unique_ptr<EmbeddingProvider> provider;
  std::optional<LexicalIndex> lexical;
  std::optional<DenseIndex> dense_index;
  std::unique_ptr<Retriever> retriever;
  if (dense) {
    dense_index = load_dense_index(index_file);
    dense_index->check_alignment(catalog);
    provider = make_provider(config);
    retriever = std::make_unique<DenseRetriever>(*dense_index, *provider, config.dense_normalize);
  } else {
    lexical = load_lexical_index(index_file);
    check_lexical_alignment(*lexical, catalog);
    retriever = std::make_unique<LexicalRetriever>(*lexical);
  }

  const std::size_t step = std::max<std::size_t>(1, splits.test.size() / 10);
  auto on_progress = [&](std::size_t done, std::size_t total) {
    if (done % step == 0 || done == total) progress << fmt::format("  {}/{} users\n", done, total);
  };
  auto result = run_experiment(splits.test, experiment_config(config), catalog, *retriever,
                               *generator, on_progress);

  const auto results = config.results_file();
  write_file(results, serialize_results(result));

  json manifest{{"config", config.effective()},
                {"config_hash", config.hash()},
                {"dataset", config.dataset},
                {"generator", generator->name()},
                {"retriever", retriever->name()},
                {"corpus_fingerprint", hex64(fnv1a64(read_file(config.corpus_file())))},
                {"index_fingerprint", retriever->fingerprint()},
                {"users", result.outcomes.size()},
                {"failures", result.failures},
                {"seed", config.seed ? json(*config.seed) : json(nullptr)}};
  if (!sidecar.is_null()) manifest["sidecar"] = sidecar;
  const auto manifest_path = results.parent_path() / "manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");

  out << fmt::format("run: generator={} retriever={} users={} failures={}\n", generator->name(),
                     retriever->name(), result.outcomes.size(), result.failures);
  out << fmt::format("wrote {}\n", results.string());
  return results;
}

EvalReport cmd_report(const RunConfig& config, const std::filesystem::path& results,
                      std::ostream& out) {
  require_file(results, "results file");
  auto records = parse_results(read_file(results), results.string());
  if (records.empty()) throw EvalError(fmt::format("{} contains no results", results.string()));
  auto outcomes = outcomes_from_records(records);
  auto report = segment_report(outcomes, config.thresholds, config.k);

  report.dataset = config.dataset;
  const auto manifest_path = results.parent_path() / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    auto manifest = json::parse(read_file(manifest_path), nullptr, false);
    if (!manifest.is_discarded() && manifest.is_object()) {
      report.dataset = manifest.value("dataset", report.dataset);
      report.model = manifest.value("generator", std::string()) + "-" +
                     manifest.value("retriever", std::string());
      report.config_hash = manifest.value("config_hash", std::string());
    }
  }

  std::size_t failures = 0;
  for (const auto& r : records) failures += r.error_count > 0 ? 1 : 0;

  const auto text = format_report(report);
  out << text;
  if (failures > 0) out << fmt::format("users with generation errors (scored as misses): {}\n", failures);
  write_file(results.parent_path() / "report.txt", text);
  write_file(results.parent_path() / "report.json", report_json(report).dump(2) + "\n");
  return report;
}

}  // namespace seqrec
