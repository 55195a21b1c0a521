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

#include "seqrec/textify.hpp"

#include <cctype>

#include <fmt/core.h>

#include "seqrec/errors.hpp"

namespace seqrec {
namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

// Collapses every line break (\n, \r, \r\n) to a single space.
std::string single_line(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r' || s[i] == '\n') {
      if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      out.push_back(' ');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::string prompt_body(std::span<const Item* const> history, const PromptTemplate& tmpl) {
  std::string text;
  text += tmpl.instruction_header;
  text += "\n\n";
  text += tmpl.history_label;
  text += '\n';
  for (const Item* item : history) {
    text += render_item(*item, tmpl);
    text += '\n';
  }
  text += '\n';
  text += tmpl.next_item_label;
  text += '\n';
  return text;
}

RenderedExample fit_to_budget(std::span<const Item* const> history, const std::string& suffix,
                              std::size_t budget, const PromptTemplate& tmpl,
                              const TokenCounter& count) {
  if (history.empty()) throw BudgetError("prompt history is empty");
  for (std::size_t drop = 0; drop < history.size(); ++drop) {
    auto kept = history.subspan(drop);
    std::string text = prompt_body(kept, tmpl) + suffix;
    std::size_t used = count(text);
    if (used <= budget) {
      return RenderedExample{std::move(text), std::nullopt, used, kept.size()};
    }
  }
  throw BudgetError(fmt::format("token budget {} cannot hold a single history item", budget));
}

}  // namespace

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t tokens = 0;
  bool in_token = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++tokens;
    in_token = !space;
  }
  return tokens;
}

std::string render_item(const Item& item, const PromptTemplate& tmpl) {
  if (item.excluded) throw RenderError(fmt::format("item {} is excluded", item.id.value));
  std::string title(trim(single_line(item.title)));
  if (title.empty()) throw RenderError(fmt::format("item {} has an empty title", item.id.value));
  std::string line = tmpl.item_line_format;
  constexpr std::string_view kSlot = "{title}";
  auto slot = line.find(kSlot);
  if (slot == std::string::npos) throw RenderError("item line format has no {title} slot");
  line.replace(slot, kSlot.size(), title);
  return std::string(trim(line));
}

RenderedExample build_training_text(std::span<const Item* const> history, const Item& target,
                                    std::size_t budget, const PromptTemplate& tmpl,
                                    const TokenCounter& count) {
  std::string target_line = render_item(target, tmpl);
  auto rendered = fit_to_budget(history, target_line + "\n", budget, tmpl, count);
  rendered.target_suffix = std::move(target_line);
  return rendered;
}

RenderedExample build_test_prompt(std::span<const Item* const> history, std::size_t budget,
                                  const PromptTemplate& tmpl, const TokenCounter& count) {
  return fit_to_budget(history, "", budget, tmpl, count);
}

std::optional<std::string> parse_generated_candidate(std::string_view raw) {
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto nl = raw.find('\n', start);
    auto line = trim(raw.substr(start, nl == std::string_view::npos ? raw.npos : nl - start));
    if (!line.empty()) return std::string(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return std::nullopt;
}

}  // namespace seqrec
