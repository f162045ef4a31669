// Copyright 2026 The vidnav Authors.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace vidnav {

enum class ErrorCode {
  kArgument,
  kDomain,
  kShape,
  kConfig,
  kInput,
  kIo,
  kParse,
  kState,
  kTransport,
  kYawDegenerate,
  kInsufficientWaypoints,
  kScaleIndeterminate,
  kGoalOccluded,
  kStartOccluded,
  kUnreachable,
  kBudgetExhausted,
};

// Stable kebab-case name, used in persisted records and HTTP bodies.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Judge output that does not follow the ranking grammar. `line()` is the
// offending input line (empty when the problem is a missing line).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string line);

  const std::string& line() const noexcept { return line_; }

 private:
  std::string line_;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts, int status = 0);

  int attempts() const noexcept { return attempts_; }
  // HTTP status of the last attempt, 0 when no response was received.
  int status() const noexcept { return status_; }

 private:
  int attempts_;
  int status_;
};

}  // namespace vidnav
