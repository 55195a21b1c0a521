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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "seqrec/corpus.hpp"

namespace seqrec {

// Prompt layout:
//
//   <instruction_header>
//   <blank line>
//   <history_label>
//   <one item line per history item>
//   <blank line>
//   <next_item_label>
//   [<target item line>]       (training texts only)
//
// Every line, including the last, ends with exactly one '\n'.
struct PromptTemplate {
  std::string instruction_header =
      "Below is a customer's purchase history on Amazon, listed in chronological order "
      "(earliest to latest).\n"
      "Each item is represented by the following format: Title: <item title>. Based on this "
      "history, predict only one item the customer is most likely to purchase next in the same "
      "format.";
  std::string history_label = "Purchase history:";
  std::string next_item_label = "Next item:";
  // `{title}` is replaced by the item title.
  std::string item_line_format = "Title: {title}";
};

// Counts tokens of a rendered prompt for the truncation budget.
using TokenCounter = std::function<std::size_t(std::string_view)>;

std::size_t whitespace_token_count(std::string_view text);

inline constexpr std::size_t kDefaultTokenBudget = 1024;

struct RenderedExample {
  std::string text;
  std::optional<std::string> target_suffix;
  std::size_t token_budget_used = 0;
  // History items kept after left truncation (a suffix of the input history).
  std::size_t history_items_used = 0;
};

std::string render_item(const Item& item, const PromptTemplate& tmpl = {});

// Left truncation at item granularity: whole history items are dropped from
// the front until the prompt fits `budget`. Throws BudgetError when not even
// the most recent history item fits.
RenderedExample build_training_text(std::span<const Item* const> history, const Item& target,
                                    std::size_t budget = kDefaultTokenBudget,
                                    const PromptTemplate& tmpl = {},
                                    const TokenCounter& count = whitespace_token_count);

RenderedExample build_test_prompt(std::span<const Item* const> history,
                                  std::size_t budget = kDefaultTokenBudget,
                                  const PromptTemplate& tmpl = {},
                                  const TokenCounter& count = whitespace_token_count);

// First non-blank line of a generation, trimmed. nullopt marks an entirely
// blank generation (the caller drops that beam).
std::optional<std::string> parse_generated_candidate(std::string_view raw);

}  // namespace seqrec
