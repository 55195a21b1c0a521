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

#include "seqrec/errors.hpp"

namespace seqrec {

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kInternal: return 1;
    case ErrorCategory::kIo: return 3;
    case ErrorCategory::kParse: return 4;
    case ErrorCategory::kValidation: return 5;
    case ErrorCategory::kTransport: return 6;
    case ErrorCategory::kContract: return 7;
    case ErrorCategory::kGeneration: return 8;
  }
  return 1;
}

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kInternal: return "internal";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kTransport: return "transport";
    case ErrorCategory::kContract: return "contract";
    case ErrorCategory::kGeneration: return "generation";
  }
  return "internal";
}

}  // namespace seqrec
