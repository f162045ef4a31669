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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vidnav/image.hpp"

namespace vidnav {

class JudgeClient;

// Verdict for one candidate video. Scores use the 0-5 rubric scale.
struct JudgeScores {
  int video = 0;        // 1-based position in the judged batch
  bool pass = false;    // binary validity
  double total = 0.0;   // the judge's own <score> value
  double tp = 0.0;      // task performance
  double as = 0.0;      // action safety
  double sc = 0.0;      // scene consistency
  std::string reason;

  // A failed video that still scored well on task performance; allowed,
  // but worth a look.
  bool flagged() const { return !pass && tp >= 3.0; }

  bool operator==(const JudgeScores&) const = default;
};

struct JudgeWeights {
  double w_as = 0.8;
  double w_sc = 0.8;
  double w_tp = 1.4;
  double normalizer = 3.0;

  void validate() const;
};

struct JudgeOutput {
  std::vector<JudgeScores> verdicts;  // ordered by video number
  int best = 0;                       // the judge's own pick

  bool operator==(const JudgeOutput&) const = default;
};

struct SelectionOutcome {
  std::optional<int> best;  // video number; empty means escalate
  double reward = 0.0;      // reward of `best`
  std::vector<JudgeScores> verdicts;

  bool escalated() const { return !best.has_value(); }
};

// The ranking-arbitrator prompt with the batch size and instruction filled in.
std::string build_ranking_prompt(std::string_view instruction, int num_videos);

// Strict reader for
//   Video N: <score> S </score> | Status: Pass|Fail | TP: a | AS: b | SC: c | Reason: r
//   ...
//   Best: Video N
// Other lines are ignored. Throws ParseError naming the offending line.
JudgeOutput parse_judge_output(std::string_view text, int num_videos);

// Canonical rendering that parse_judge_output reads back unchanged.
std::string format_judge_output(const JudgeOutput& output);

// (w_tp*tp + w_as*as + w_sc*sc) / normalizer
double reward(const JudgeScores& scores, const JudgeWeights& weights = {});

// argmax of reward over passing verdicts, lowest video number on ties.
// No passing verdict means escalation to the supervisor.
SelectionOutcome select_best(std::span<const JudgeScores> verdicts,
                             const JudgeWeights& weights = {});

struct JudgePolicy {
  JudgeWeights weights;
  int retries = 1;             // extra judge calls after a parse failure
  bool per_candidate = false;  // one call per video instead of a joint call
};

struct JudgeRun {
  std::vector<JudgeScores> verdicts;  // one per input sequence, in order
  std::vector<std::string> raw;       // every judge response received
  std::vector<std::string> errors;    // parse failures, in call order
  std::optional<int> judge_best;
};

// Calls the judge and parses the answer. A batch that still fails to parse
// after the retries is marked Fail rather than aborting.
JudgeRun judge_candidates(JudgeClient& client, std::string_view instruction,
                          const std::vector<FrameSequence>& candidates,
                          const JudgePolicy& policy = {});

}  // namespace vidnav
