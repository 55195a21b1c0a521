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

#include "seqrec/generate.hpp"

#include <fmt/core.h>

#include "seqrec/errors.hpp"
#include "seqrec/http_client.hpp"

namespace seqrec {

CandidateSet lis_generate(std::span<const Item* const> history, const PromptTemplate& tmpl) {
  if (history.empty()) throw GenerationError("last-item search needs a non-empty history");
  CandidateSet set;
  set.beam_width = 1;
  set.candidates.push_back({render_item(*history.back(), tmpl), std::nullopt});
  return set;
}

CandidateSet oracle_generate(const Item& target, const PromptTemplate& tmpl) {
  CandidateSet set;
  set.beam_width = 1;
  set.candidates.push_back({render_item(target, tmpl), std::nullopt});
  return set;
}

CandidateSet external_generate(const RenderedExample& prompt,
                               const ExternalGeneratorOptions& options) {
  if (options.beams == 0) throw ValidationError("beam width must be at least 1");
  nlohmann::json request{{"prompt", prompt.text},
                         {"num_beams", options.beams},
                         {"max_new_tokens", options.max_new_tokens}};
  nlohmann::json response;
  try {
    response = post_json(options.base_url, "/generate", request, options.retry);
  } catch (const TransportError& e) {
    throw GenerationError(fmt::format("generation failed after {} attempt(s): {}", e.attempts(),
                                      e.what()));
  }
  CandidateSet set;
  set.beam_width = options.beams;
  try {
    const auto& candidates = response.at("candidates");
    if (!candidates.is_array()) throw GenerationError("/generate: candidates is not a list");
    for (const auto& c : candidates) {
      if (set.candidates.size() == options.beams) break;
      auto query = parse_generated_candidate(c.at("text").get<std::string>());
      if (!query) continue;
      std::optional<double> score;
      if (auto it = c.find("score"); it != c.end() && it->is_number()) score = it->get<double>();
      set.candidates.push_back({std::move(*query), score});
    }
  } catch (const nlohmann::json::exception& e) {
    throw GenerationError(fmt::format("/generate: malformed response: {}", e.what()));
  }
  return set;
}

CandidateSet LastItemGenerator::generate(const GenerationInput& input) const {
  auto set = lis_generate(input.history, tmpl_);
  set.user = input.user;
  return set;
}

CandidateSet OracleGenerator::generate(const GenerationInput& input) const {
  if (input.target == nullptr) throw GenerationError("oracle generator needs the target item");
  auto set = oracle_generate(*input.target, tmpl_);
  set.user = input.user;
  return set;
}

CandidateSet ExternalGenerator::generate(const GenerationInput& input) const {
  if (input.prompt == nullptr) throw GenerationError("external generator needs a prompt");
  auto set = external_generate(*input.prompt, options_);
  set.user = input.user;
  return set;
}

}  // namespace seqrec
