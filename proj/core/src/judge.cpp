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


#include "vidnav/judge.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include "vidnav/adapters.hpp"
#include "vidnav/error.hpp"

namespace vidnav {
namespace {

constexpr std::string_view kPromptTemplate = R"(Role Definition: You are a drone video quality ranking arbitrator and task verification expert. You have {num_videos} {candidate_videos}, all based on the same starting scene and instruction.

Core Task: Verify each video's success status individually, then evaluate them together to determine a weighted score and final rank.

----------------------------------------------------------------------
Step 1: Task Verification (Individual Check - Determine Status)
Analyze the logical structure and verify against strict red lines.
- Structure Analysis:
  - Type A (Single-Stage): Continuous action or final state (e.g., "Fly forward", "Hover").
  - Type B (Multi-Stage): Sequential logic (e.g., "First A then B", "Next...").
- Disqualification Criteria (Status = Fail):
  - Motion Failure: Instruction implies movement, but view barely changes.
  - Directional Deviation: Movement is opposite to instruction.
  - Target Miss: Stopping far from the required destination.
  - Trajectory Incompleteness: Executing only a fraction of a required shape.
  - Stage Omission (Type B): Skipping intermediate steps (shortcutting).
  - Sequence Error (Type B): Wrong order of actions.
  - General Failures: Hallucinations, Physics Violation (teleportation), Obscuring Blur.
- Passing Criteria (Status = Pass): Must NOT violate red lines. Multi-Stage tasks must demonstrate the intent of all main stages.

Step 2: Ranking Evaluation Framework (Relative Check)
Evaluate all videos on the following dimensions:
1. Task Performance (TP) (Highest Priority):
   - Logical Fidelity: For Multi-Stage, prioritize coverage over perfection. A blurry "Pass" outranks a shortcut "Fail".
   - Execution Quality: Magnitude (Significant > Minimal), Target Accuracy (Correct > Incorrect), Trajectory Correctness (Correct > Distorted).
2. Action Safety (AS): Physics & Stability (Coherent motion > Teleportation; Smooth control > Jitter).
3. Scene Consistency (SC): Visual Integrity (Stable environment > Hallucinations/Clipping).

Step 3: Scoring Standards & Ranking
Assign scores (0.0 - 5.0) based on the levels below. Note that a "Fail" status usually corresponds to lower levels:
- Level 1 (Failure, 0.0-1.0): Violates core logic. Stationary, wrong direction. (Status: Fail)
- Level 2 (Poor, 1.0-2.9): Attempted but failed significantly. (Status: Fail/Pass)
- Level 3 (Average, 3.0-3.9): Completed but lacks polish. Shaky path. (Status: Pass)
- Level 4 (Good, 4.0-4.5): Precise requirements. Good trajectory. (Status: Pass)
- Level 5 (Excellent, 4.8-5.0): Flawless execution. Natural physics. (Status: Pass)

Final Calculation:
Total Score = (TP * 1.4 + AS * 0.8 + SC * 0.8) / 3. Rank descending.

----------------------------------------------------------------------
Input Information:
Current Instruction: {instruction}

Output Format (Strictly follow):
{output_lines}
Best: Video N
)";

constexpr std::string_view kFormatLine =
    "Video {n}: <score> X.X </score> | Status: [Pass/Fail] | TP: X.X | AS: X.X | "
    "SC: X.X | Reason: [Concise explanation]";

void replace_all(std::string& text, std::string_view key, std::string_view value) {
  size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Shortest text that reads back to the same double, always with a decimal.
std::string format_score(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

double parse_number(const std::string& text, const std::string& field,
                    const std::string& line) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw ParseError("malformed " + field + " value '" + text + "'", line);
  }
  if (value < 0.0 || value > 5.0) {
    throw ParseError(field + " " + text + " outside [0, 5]", line);
  }
  return value;
}

bool starts_with_word(const std::string& line, std::string_view word) {
  if (line.size() < word.size()) return false;
  for (size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(line[i])) != word[i]) return false;
  }
  return line.size() == word.size() ||
         !std::isalpha(static_cast<unsigned char>(line[word.size()]));
}

// Judges sometimes wrap lines in markdown emphasis or list bullets.
std::string strip_markup(const std::string& raw) {
  std::string s = trim(raw);
  auto decoration = [](char c) { return c == '*' || c == '`' || c == '-' || c == '>'; };
  while (!s.empty() && decoration(s.front())) s = trim(std::string_view(s).substr(1));
  while (!s.empty() && (s.back() == '*' || s.back() == '`')) {
    s = trim(std::string_view(s).substr(0, s.size() - 1));
  }
  return s;
}

}  // namespace

void JudgeWeights::validate() const {
  if (!(w_as > 0.0 && w_sc > 0.0 && w_tp > 0.0 && normalizer > 0.0)) {
    throw Error(ErrorCode::kConfig, "judge weights and normalizer must be positive");
  }
}

std::string build_ranking_prompt(std::string_view instruction, int num_videos) {
  if (trim(instruction).empty()) {
    throw Error(ErrorCode::kArgument, "judge instruction must not be empty");
  }
  if (num_videos < 1) {
    throw Error(ErrorCode::kArgument, "judge batch needs at least 1 video");
  }
  auto line_for = [](int n) {
    std::string l(kFormatLine);
    replace_all(l, "{n}", std::to_string(n));
    return l;
  };
  std::string lines = line_for(1);
  if (num_videos == 2) {
    lines += "\n" + line_for(2);
  } else if (num_videos > 2) {
    lines += "\n...\n" + line_for(num_videos);
  }
  std::string prompt(kPromptTemplate);
  replace_all(prompt, "{candidate_videos}",
              num_videos == 1 ? "candidate video" : "candidate videos");
  replace_all(prompt, "{num_videos}", std::to_string(num_videos));
  replace_all(prompt, "{output_lines}", lines);
  // Last, so braces inside the instruction are left alone.
  replace_all(prompt, "{instruction}", trim(instruction));
  return prompt;
}

JudgeOutput parse_judge_output(std::string_view text, int num_videos) {
  if (num_videos < 1) {
    throw Error(ErrorCode::kArgument, "judge batch needs at least 1 video");
  }
  static const std::regex kVideo(
      R"(^Video\s+(\d+)\s*:\s*<score>\s*(\S+?)\s*</score>\s*\|\s*Status\s*:\s*\[?\s*(\w+)\s*\]?\s*\|\s*TP\s*:\s*(\S+)\s*\|\s*AS\s*:\s*(\S+)\s*\|\s*SC\s*:\s*(\S+)\s*\|\s*Reason\s*:(.*)$)",
      std::regex::icase);
  static const std::regex kBest(R"(^Best\s*:\s*Video\s+(\d+)$)", std::regex::icase);

  std::map<int, JudgeScores> seen;
  std::optional<int> best;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  while (std::getline(in, raw_line)) {
    const std::string line = strip_markup(raw_line);
    const std::string original = trim(raw_line);
    if (starts_with_word(line, "video")) {
      if (line.find("<score>") == std::string::npos ||
          line.find("</score>") == std::string::npos) {
        throw ParseError("malformed score tag", original);
      }
      std::smatch m;
      if (!std::regex_match(line, m, kVideo)) {
        throw ParseError("video line does not follow the output format", original);
      }
      JudgeScores s;
      if (m[1].length() > 6) throw ParseError("bad video number", original);
      s.video = std::stoi(m[1].str());
      if (s.video < 1 || s.video > num_videos) {
        throw ParseError("video number " + m[1].str() + " outside [1, " +
                             std::to_string(num_videos) + "]",
                         original);
      }
      if (seen.count(s.video)) {
        throw ParseError("duplicate line for video " + m[1].str(), original);
      }
      s.total = parse_number(m[2].str(), "score", original);
      std::string status = m[3].str();
      std::transform(status.begin(), status.end(), status.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (status == "pass") {
        s.pass = true;
      } else if (status == "fail") {
        s.pass = false;
      } else {
        throw ParseError("status must be Pass or Fail, got '" + m[3].str() + "'",
                         original);
      }
      s.tp = parse_number(m[4].str(), "TP", original);
      s.as = parse_number(m[5].str(), "AS", original);
      s.sc = parse_number(m[6].str(), "SC", original);
      s.reason = trim(m[7].str());
      seen.emplace(s.video, std::move(s));
    } else if (starts_with_word(line, "best")) {
      std::smatch m;
      if (!std::regex_match(line, m, kBest)) {
        throw ParseError("malformed Best line", original);
      }
      if (best) throw ParseError("duplicate Best line", original);
      if (m[1].length() > 6) throw ParseError("bad Best video number", original);
      const int n = std::stoi(m[1].str());
      if (n < 1 || n > num_videos) {
        throw ParseError("Best video " + m[1].str() + " outside [1, " +
                             std::to_string(num_videos) + "]",
                         original);
      }
      best = n;
    }
  }
  for (int n = 1; n <= num_videos; ++n) {
    if (!seen.count(n)) {
      throw ParseError("missing line for Video " + std::to_string(n), "");
    }
  }
  if (!best) throw ParseError("missing 'Best: Video N' line", "");
  JudgeOutput out;
  out.best = *best;
  for (auto& entry : seen) out.verdicts.push_back(std::move(entry.second));
  return out;
}

std::string format_judge_output(const JudgeOutput& output) {
  std::ostringstream out;
  for (const JudgeScores& s : output.verdicts) {
    out << "Video " << s.video << ": <score> " << format_score(s.total)
        << " </score> | Status: " << (s.pass ? "Pass" : "Fail")
        << " | TP: " << format_score(s.tp) << " | AS: " << format_score(s.as)
        << " | SC: " << format_score(s.sc) << " | Reason: " << s.reason << '\n';
  }
  out << "Best: Video " << output.best << '\n';
  return out.str();
}

double reward(const JudgeScores& scores, const JudgeWeights& weights) {
  return (weights.w_tp * scores.tp + weights.w_as * scores.as +
          weights.w_sc * scores.sc) /
         weights.normalizer;
}

SelectionOutcome select_best(std::span<const JudgeScores> verdicts,
                             const JudgeWeights& weights) {
  if (verdicts.empty()) {
    throw Error(ErrorCode::kArgument, "selection needs at least 1 verdict");
  }
  weights.validate();
  SelectionOutcome out;
  out.verdicts.assign(verdicts.begin(), verdicts.end());
  for (const JudgeScores& s : verdicts) {
    if (!s.pass) continue;
    const double r = reward(s, weights);
    if (!out.best || r > out.reward || (r == out.reward && s.video < *out.best)) {
      out.best = s.video;
      out.reward = r;
    }
  }
  return out;
}

JudgeRun judge_candidates(JudgeClient& client, std::string_view instruction,
                          const std::vector<FrameSequence>& candidates,
                          const JudgePolicy& policy) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kArgument, "nothing to judge");
  }
  JudgeRun run;
  auto attempt = [&](const std::vector<FrameSequence>& batch)
      -> std::optional<JudgeOutput> {
    const int n = static_cast<int>(batch.size());
    const std::string prompt = build_ranking_prompt(instruction, n);
    for (int i = 0; i <= std::max(0, policy.retries); ++i) {
      std::string text = client.rank(prompt, batch);
      run.raw.push_back(text);
      try {
        return parse_judge_output(text, n);
      } catch (const ParseError& e) {
        run.errors.push_back(e.what());
      }
    }
    return std::nullopt;
  };
  auto unparsed = [](int video) {
    JudgeScores s;
    s.video = video;
    s.pass = false;
    s.reason = "judge output could not be parsed";
    return s;
  };

  if (!policy.per_candidate) {
    if (auto out = attempt(candidates)) {
      run.verdicts = out->verdicts;
      run.judge_best = out->best;
    } else {
      for (size_t i = 0; i < candidates.size(); ++i) {
        run.verdicts.push_back(unparsed(static_cast<int>(i) + 1));
      }
    }
    return run;
  }
  for (size_t i = 0; i < candidates.size(); ++i) {
    const int video = static_cast<int>(i) + 1;
    if (auto out = attempt({candidates[i]})) {
      JudgeScores s = out->verdicts.front();
      s.video = video;
      run.verdicts.push_back(std::move(s));
    } else {
      run.verdicts.push_back(unparsed(video));
    }
  }
  return run;
}

}  // namespace vidnav
