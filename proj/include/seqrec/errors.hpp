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
#include <stdexcept>
#include <string>

namespace seqrec {

// Broad failure classes. Each maps to a distinct process exit code.
enum class ErrorCategory {
  kInternal,
  kIo,
  kParse,
  kValidation,
  kTransport,
  kContract,
  kGeneration,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorCategory::kIo, message) {}
};

// Raw dump could not be ingested (too many unparseable records).
class CorpusFormatError : public Error {
 public:
  CorpusFormatError(const std::string& message, std::size_t first_bad_line)
      : Error(ErrorCategory::kParse, message), first_bad_line_(first_bad_line) {}

  std::size_t first_bad_line() const noexcept { return first_bad_line_; }

 private:
  std::size_t first_bad_line_;
};

// Malformed intermediate artifact (corpus file, index file, results file).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t record = 0)
      : Error(ErrorCategory::kParse, message), record_(record) {}

  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorCategory::kValidation, message) {}
};

class SplitError : public Error {
 public:
  explicit SplitError(const std::string& message) : Error(ErrorCategory::kValidation, message) {}
};

class StatsError : public Error {
 public:
  explicit StatsError(const std::string& message) : Error(ErrorCategory::kValidation, message) {}
};

class RenderError : public Error {
 public:
  explicit RenderError(const std::string& message) : Error(ErrorCategory::kValidation, message) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& message) : Error(ErrorCategory::kValidation, message) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& message) : Error(ErrorCategory::kValidation, message) {}
};

class EvalError : public Error {
 public:
  explicit EvalError(const std::string& message) : Error(ErrorCategory::kValidation, message) {}
};

// Dimension or fingerprint disagreement between an index and a provider.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& message) : Error(ErrorCategory::kContract, message) {}
};

class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error(ErrorCategory::kTransport, message), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& message)
      : Error(ErrorCategory::kGeneration, message) {}
};

// Process exit code for a failure category; 0 is reserved for success.
int exit_code(ErrorCategory category) noexcept;

const char* category_name(ErrorCategory category) noexcept;

}  // namespace seqrec
