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

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace seqrec {

// Rewrites one record in either strict JSON or Python object-literal notation
// (single-quoted strings, True/False/None, \xHH escapes) into strict JSON text.
// Quote characters are only rewritten outside string bodies. Returns nullopt
// for an unterminated string or a malformed escape.
std::optional<std::string> normalize_loose_literal(std::string_view text);

// Parses a record through normalize_loose_literal. Returns nullopt unless the
// result is a JSON object.
std::optional<nlohmann::json> parse_loose_object(std::string_view text);

}  // namespace seqrec
