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

#include "vidnav/error.hpp"

namespace vidnav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kConfig: return "configuration";
    case ErrorCode::kInput: return "input";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kState: return "state";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kYawDegenerate: return "yaw-degenerate";
    case ErrorCode::kInsufficientWaypoints: return "insufficient-waypoints";
    case ErrorCode::kScaleIndeterminate: return "scale-indeterminate";
    case ErrorCode::kGoalOccluded: return "goal-occluded";
    case ErrorCode::kStartOccluded: return "start-occluded";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kBudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

ParseError::ParseError(const std::string& message, std::string line)
    : Error(ErrorCode::kParse,
            line.empty() ? message : message + " in line \"" + line + "\""),
      line_(std::move(line)) {}

TransportError::TransportError(const std::string& message, int attempts,
                               int status)
    : Error(ErrorCode::kTransport,
            message + " after " + std::to_string(attempts) + " attempt(s)"),
      attempts_(attempts),
      status_(status) {}

}  // namespace vidnav
