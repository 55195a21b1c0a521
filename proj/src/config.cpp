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

#include "seqrec/config.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <fmt/core.h>

#include "seqrec/binary_io.hpp"
#include "seqrec/errors.hpp"

namespace seqrec {

using nlohmann::json;

namespace {

void flatten(const json& value, const std::string& prefix, std::map<std::string, json>& out) {
  if (value.is_object() && prefix != "sidecar_recipe") {
    for (const auto& [key, child] : value.items()) {
      flatten(child, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else {
    out[prefix] = value;
  }
}

template <typename T>
T as(const std::string& key, const json& value) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(fmt::format("config key '{}' has the wrong type ({})", key, value.dump()));
  }
}

std::size_t as_count(const std::string& key, const json& value) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
    throw ValidationError(fmt::format("config key '{}' must be a non-negative integer", key));
  }
  return value.get<std::size_t>();
}

std::vector<std::string> as_names(const std::string& key, const json& value) {
  if (value.is_string()) return {value.get<std::string>()};
  return as<std::vector<std::string>>(key, value);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

void RunConfig::apply(const json& values) {
  if (!values.is_object()) throw ValidationError("config must be a JSON object");
  std::map<std::string, json> flat;
  flatten(values, "", flat);
  for (const auto& [key, v] : flat) {
    if (key == "paths.reviews") reviews_path = as<std::string>(key, v);
    else if (key == "paths.metadata") metadata_path = as<std::string>(key, v);
    else if (key == "paths.work_dir") work_dir = resolve(as<std::string>(key, v));
    else if (key == "paths.index") index_path = as<std::string>(key, v);
    else if (key == "paths.results") results_path = as<std::string>(key, v);
    else if (key == "dataset") dataset = as<std::string>(key, v);
    else if (key == "aliases.user") aliases.user = as_names(key, v);
    else if (key == "aliases.item") aliases.item = as_names(key, v);
    else if (key == "aliases.timestamp") aliases.timestamp = as_names(key, v);
    else if (key == "aliases.title") aliases.title = as_names(key, v);
    else if (key == "aliases.extra") aliases.extra = as_names(key, v);
    else if (key == "kcore.k") kcore = as_count(key, v);
    else if (key == "kcore.refilter") kcore_refilter = as<bool>(key, v);
    else if (key == "template.header") tmpl.instruction_header = as<std::string>(key, v);
    else if (key == "template.history_label") tmpl.history_label = as<std::string>(key, v);
    else if (key == "template.item_line") tmpl.item_line_format = as<std::string>(key, v);
    else if (key == "template.next_label") tmpl.next_item_label = as<std::string>(key, v);
    else if (key == "template.token_budget") token_budget = as_count(key, v);
    else if (key == "generator") generator = as<std::string>(key, v);
    else if (key == "retriever") retriever = as<std::string>(key, v);
    else if (key == "bm25.k1") bm25.k1 = as<double>(key, v);
    else if (key == "bm25.b") bm25.b = as<double>(key, v);
    else if (key == "dense.provider") dense_provider = as<std::string>(key, v);
    else if (key == "dense.model") dense_model = as<std::string>(key, v);
    else if (key == "dense.table") dense_table = as<std::string>(key, v);
    else if (key == "dense.dimension") dense_dimension = as_count(key, v);
    else if (key == "dense.normalize") dense_normalize = as<bool>(key, v);
    else if (key == "dense.batch_size") dense_batch_size = as_count(key, v);
    else if (key == "dense.in_flight") dense_in_flight = as_count(key, v);
    else if (key == "k") k = as_count(key, v);
    else if (key == "beams") beams = as_count(key, v);
    else if (key == "per_beam_depth") per_beam_depth = as_count(key, v);
    else if (key == "max_new_tokens") max_new_tokens = as_count(key, v);
    else if (key == "fusion") fusion = parse_fusion_policy(as<std::string>(key, v));
    else if (key == "exclude_history") exclude_history = as<bool>(key, v);
    else if (key == "workers") workers = as_count(key, v);
    else if (key == "thresholds.l") thresholds.lower = as_count(key, v);
    else if (key == "thresholds.h") {
      thresholds.upper = as_count(key, v);
      upper_threshold_set = true;
    } else if (key == "sidecar_url") sidecar_url = as<std::string>(key, v);
    else if (key == "retry.attempts") retry_attempts = static_cast<int>(as_count(key, v));
    else if (key == "retry.backoff_ms") retry_backoff_ms = as_count(key, v);
    else if (key == "seed") seed = as<std::uint64_t>(key, v);
    else if (key == "sidecar_recipe") sidecar_recipe = v;
    else throw ValidationError(fmt::format("unknown config key '{}'", key));
  }
}

std::filesystem::path RunConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

std::filesystem::path RunConfig::lexical_index_file() const {
  return index_path.empty() ? work_dir / "lexical.srlex" : resolve(index_path);
}

std::filesystem::path RunConfig::dense_index_file() const {
  if (!index_path.empty()) return resolve(index_path);
  return work_dir / fmt::format("dense_{}.sremb", dense_provider == "mock" ? "hash-mock" : dense_model);
}

std::filesystem::path RunConfig::run_dir() const {
  std::string retr = retriever == "lexical" ? "bm25"
                     : dense_provider == "mock" ? "dense-hash-mock"
                                                : "dense-" + dense_model;
  return work_dir / fmt::format("run_{}_{}", generator, retr);
}

std::filesystem::path RunConfig::results_file() const {
  return results_path.empty() ? run_dir() / "results.jsonl" : resolve(results_path);
}

std::optional<std::size_t> default_upper_threshold(const std::string& dataset) {
  const auto name = lower(dataset);
  if (name == "beauty") return 14;
  if (name == "toys" || name == "toys_and_games") return 13;
  if (name == "sports" || name == "sports_and_outdoors") return 13;
  return std::nullopt;
}

void RunConfig::finalize() {
  if (!upper_threshold_set) {
    auto h = default_upper_threshold(dataset);
    if (!h) {
      throw ValidationError(fmt::format(
          "no default upper segment threshold for dataset '{}'; set thresholds.h", dataset));
    }
    thresholds.upper = *h;
    upper_threshold_set = true;
  }
  thresholds.validate();
  auto one_of = [](const std::string& key, const std::string& value,
                   std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
      if (value == a) return;
    }
    throw ValidationError(fmt::format("invalid {} '{}'", key, value));
  };
  one_of("generator", generator, {"lis", "oracle", "external"});
  one_of("retriever", retriever, {"lexical", "dense"});
  one_of("dense.provider", dense_provider, {"mock", "file", "http"});
  if (k == 0) throw ValidationError("k must be at least 1");
  if (beams == 0) throw ValidationError("beams must be at least 1");
  if (workers == 0) throw ValidationError("workers must be at least 1");
  if (kcore == 0) throw ValidationError("kcore.k must be at least 1");
  if (dense_dimension < 2) throw ValidationError("dense.dimension must be at least 2");
  if (retry_attempts < 1) throw ValidationError("retry.attempts must be at least 1");
}

json RunConfig::effective() const {
  json out;
  out["paths"] = {{"reviews", reviews_path},
                  {"metadata", metadata_path},
                  {"index", index_path},
                  {"results", results_path}};
  out["dataset"] = dataset;
  out["aliases"] = {{"user", aliases.user},
                    {"item", aliases.item},
                    {"timestamp", aliases.timestamp},
                    {"title", aliases.title},
                    {"extra", aliases.extra}};
  out["kcore"] = {{"k", kcore}, {"refilter", kcore_refilter}};
  out["template"] = {{"header", tmpl.instruction_header},
                     {"history_label", tmpl.history_label},
                     {"item_line", tmpl.item_line_format},
                     {"next_label", tmpl.next_item_label},
                     {"token_budget", token_budget}};
  out["generator"] = generator;
  out["retriever"] = retriever;
  out["bm25"] = {{"k1", bm25.k1}, {"b", bm25.b}};
  out["dense"] = {{"provider", dense_provider},   {"model", dense_model},
                  {"table", dense_table},         {"dimension", dense_dimension},
                  {"normalize", dense_normalize}, {"batch_size", dense_batch_size},
                  {"in_flight", dense_in_flight}};
  out["k"] = k;
  out["beams"] = beams;
  out["per_beam_depth"] = per_beam_depth == 0 ? k : per_beam_depth;
  out["max_new_tokens"] = max_new_tokens;
  out["fusion"] = fusion_policy_name(fusion);
  out["exclude_history"] = exclude_history;
  out["thresholds"] = {{"l", thresholds.lower}, {"h", thresholds.upper}};
  out["sidecar_url"] = sidecar_url;
  out["retry"] = {{"attempts", retry_attempts}, {"backoff_ms", retry_backoff_ms}};
  out["seed"] = seed ? json(*seed) : json(nullptr);
  if (!sidecar_recipe.is_null()) out["sidecar_recipe"] = sidecar_recipe;
  return out;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(effective().dump())); }

RunConfig load_config(const std::filesystem::path& path) {
  auto text = read_file(path);
  auto value = json::parse(text, nullptr, false, /*ignore_comments=*/true);
  if (value.is_discarded()) throw ValidationError(fmt::format("{}: not valid JSON", path.string()));
  RunConfig config;
  config.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  config.work_dir = config.base_dir / "work";
  config.apply(value);
  return config;
}

}  // namespace seqrec
