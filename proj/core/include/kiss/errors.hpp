// Copyright 2026 The kiss-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
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

namespace kiss {

// Malformed input data. Carries the offending file and 1-based line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// A record references something that does not exist (e.g. unknown app id).
class IntegrityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration values.
class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  using std::domain_error::domain_error;
};

// Caller broke an operation's precondition (duplicate id, unsorted trace, ...).
class ContractViolation : public std::logic_error {
  using std::logic_error::logic_error;
};

// Simulator state became inconsistent. Aborts the run.
class ConsistencyError : public std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace kiss
