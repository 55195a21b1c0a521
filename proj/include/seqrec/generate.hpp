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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqrec/corpus.hpp"
#include "seqrec/embedding.hpp"
#include "seqrec/textify.hpp"

namespace seqrec {

struct Candidate {
  std::string query;
  std::optional<double> score;

  bool operator==(const Candidate&) const = default;
};

// Generated next-item texts in beam order (most preferred first).
struct CandidateSet {
  std::string user;
  std::vector<Candidate> candidates;
  std::size_t beam_width = 1;
};

// Everything a generator may look at for one test user. `target` is only
// set by the evaluation harness and only read by the oracle generator.
struct GenerationInput {
  std::string user;
  std::span<const Item* const> history;
  const RenderedExample* prompt = nullptr;
  const Item* target = nullptr;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string name() const = 0;
  virtual std::size_t max_candidates() const = 0;
  virtual bool needs_prompt() const = 0;
  // Throws GenerationError when no candidates can be produced.
  virtual CandidateSet generate(const GenerationInput& input) const = 0;
};

// Last Item Search: the rendered last history item is the only query.
CandidateSet lis_generate(std::span<const Item* const> history, const PromptTemplate& tmpl = {});

// Upper-bound diagnostic: queries with the held-out target itself.
CandidateSet oracle_generate(const Item& target, const PromptTemplate& tmpl = {});

struct ExternalGeneratorOptions {
  std::string base_url;
  std::size_t beams = 5;
  std::size_t max_new_tokens = 50;
  RetryPolicy retry{};
};

// Sends the prompt to the sidecar's `POST /generate` and parses each returned
// continuation with parse_generated_candidate, keeping order. Blank beams are
// dropped. Transport failures surface as GenerationError.
CandidateSet external_generate(const RenderedExample& prompt,
                               const ExternalGeneratorOptions& options);

class LastItemGenerator : public Generator {
 public:
  explicit LastItemGenerator(PromptTemplate tmpl = {}) : tmpl_(std::move(tmpl)) {}
  std::string name() const override { return "lis"; }
  std::size_t max_candidates() const override { return 1; }
  bool needs_prompt() const override { return false; }
  CandidateSet generate(const GenerationInput& input) const override;

 private:
  PromptTemplate tmpl_;
};

class OracleGenerator : public Generator {
 public:
  explicit OracleGenerator(PromptTemplate tmpl = {}) : tmpl_(std::move(tmpl)) {}
  std::string name() const override { return "oracle"; }
  std::size_t max_candidates() const override { return 1; }
  bool needs_prompt() const override { return false; }
  CandidateSet generate(const GenerationInput& input) const override;

 private:
  PromptTemplate tmpl_;
};

class ExternalGenerator : public Generator {
 public:
  explicit ExternalGenerator(ExternalGeneratorOptions options) : options_(std::move(options)) {}
  std::string name() const override { return "external"; }
  std::size_t max_candidates() const override { return options_.beams; }
  bool needs_prompt() const override { return true; }
  CandidateSet generate(const GenerationInput& input) const override;

 private:
  ExternalGeneratorOptions options_;
};

}  // namespace seqrec
