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


#include <gtest/gtest.h>

#include <random>

#include "../support/oracles.hpp"
#include "vidnav/adapters.hpp"
#include "vidnav/error.hpp"
#include "vidnav/judge.hpp"

namespace vidnav {
namespace {

JudgeScores v(int n, bool pass, double tp, double as, double sc) {
  return {n, pass, 0.0, tp, as, sc, "r"};
}

TEST(JudgePrompt, BatchSizeAndFormula) {
  const auto p = build_ranking_prompt("orbit the tree", 3);
  EXPECT_NE(p.find("You have 3 candidate videos"), std::string::npos);
  EXPECT_NE(p.find("Total Score = (TP * 1.4 + AS * 0.8 + SC * 0.8) / 3"), std::string::npos);
  EXPECT_NE(p.find("orbit the tree"), std::string::npos);
  EXPECT_NE(p.find("Video 3: <score>"), std::string::npos);
}

TEST(JudgePrompt, SingleVideo) {
  const auto p = build_ranking_prompt("hover", 1);
  EXPECT_NE(p.find("You have 1 candidate video"), std::string::npos);
  EXPECT_EQ(p.find("candidate videos"), std::string::npos);
  EXPECT_NE(p.find("Total Score = (TP * 1.4 + AS * 0.8 + SC * 0.8) / 3"), std::string::npos);
  EXPECT_NE(p.find("Scene Consistency"), std::string::npos);
}

TEST(JudgePrompt, EmptyInstruction) {
  try {
    build_ranking_prompt("  ", 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArgument);
  }
}

TEST(JudgeParse, CanonicalLine) {
  const auto out = parse_judge_output(
      "Video 1: <score> 4.5 </score> | Status: Pass | TP: 4.8 | AS: 4.0 | SC: 4.2 | "
      "Reason: smooth orbit\nBest: Video 1\n",
      1);
  ASSERT_EQ(out.verdicts.size(), 1u);
  const auto& s = out.verdicts[0];
  EXPECT_TRUE(s.pass);
  EXPECT_DOUBLE_EQ(s.total, 4.5);
  EXPECT_DOUBLE_EQ(s.tp, 4.8);
  EXPECT_DOUBLE_EQ(s.as, 4.0);
  EXPECT_DOUBLE_EQ(s.sc, 4.2);
  EXPECT_EQ(s.reason, "smooth orbit");
  EXPECT_EQ(out.best, 1);
}

TEST(JudgeParse, FailAndTolerantMarkup) {
  const auto out = parse_judge_output(
      "Here are my verdicts.\n"
      "**Video 1: <score> 1.0 </score> | Status: Fail | TP: 1 | AS: 2 | SC: 3 | Reason: "
      "crashes**\n"
      "- video 2: <score>3.5</score> | status: [Pass] | TP: 4 | AS: 3 | SC: 3 | Reason: ok\n"
      "Best: Video 2\n",
      2);
  EXPECT_FALSE(out.verdicts[0].pass);
  EXPECT_TRUE(out.verdicts[1].pass);
  EXPECT_EQ(out.best, 2);
}

TEST(JudgeParse, MissingBestNamesNoLine) {
  try {
    parse_judge_output(
        "Video 1: <score> 4.5 </score> | Status: Pass | TP: 4.8 | AS: 4.0 | SC: 4.2 | Reason: x",
        1);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("Best"), std::string::npos);
  }
}

TEST(JudgeParse, OffendingLineIsReported) {
  const std::string bad =
      "Video 1: <score> 7.5 </score> | Status: Pass | TP: 4 | AS: 4 | SC: 4 | Reason: x";
  try {
    parse_judge_output(bad + "\nBest: Video 1", 1);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), bad);
  }
}

TEST(JudgeParse, RoundTripRandom) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> tenth(0, 50);
  for (int trial = 0; trial < 50; ++trial) {
    JudgeOutput o;
    const int n = 1 + trial % 6;
    for (int i = 1; i <= n; ++i) {
      o.verdicts.push_back({i, tenth(rng) % 2 == 0, tenth(rng) / 10.0, tenth(rng) / 10.0,
                            tenth(rng) / 10.0, tenth(rng) / 10.0, "reason " + std::to_string(i)});
    }
    o.best = 1 + trial % n;
    const auto text = format_judge_output(o);
    const auto parsed = parse_judge_output(text, n);
    EXPECT_EQ(parsed, o);
    EXPECT_EQ(format_judge_output(parsed), text);
  }
}

TEST(Reward, Arithmetic) {
  EXPECT_EQ(reward(v(1, true, 5, 5, 5)), 5.0);
  EXPECT_EQ(reward(v(1, true, 0, 0, 0)), 0.0);
  EXPECT_NEAR(reward(v(1, true, 5, 4, 4)), (7.0 + 3.2 + 3.2) / 3.0, 1e-12);
  EXPECT_NEAR(reward(v(1, true, 5, 4, 4)), 4.4667, 1e-4);
}

TEST(Select, ValidityGatesReward) {
  // Rewards 3.1 / 4.9 / 4.2 with the middle one invalid.
  std::vector<JudgeScores> b{v(1, true, 3.1, 3.1, 3.1), v(2, false, 4.9, 4.9, 4.9),
                             v(3, true, 4.2, 4.2, 4.2)};
  const auto out = select_best(b);
  ASSERT_TRUE(out.best);
  EXPECT_EQ(*out.best, 3);
  EXPECT_NEAR(out.reward, 4.2, 1e-12);
}

TEST(Select, EscalatesAndBreaksTies) {
  std::vector<JudgeScores> fail{v(1, false, 5, 5, 5), v(2, false, 4, 4, 4)};
  EXPECT_TRUE(select_best(fail).escalated());
  std::vector<JudgeScores> tie{v(1, false, 5, 5, 5), v(2, true, 3, 3, 3), v(3, true, 3, 3, 3)};
  EXPECT_EQ(*select_best(tie).best, 2);
  EXPECT_THROW(select_best(std::vector<JudgeScores>{}), Error);
  JudgeWeights bad;
  bad.normalizer = 0;
  EXPECT_THROW(select_best(tie, bad), Error);
}

TEST(Select, MatchesOracle) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> s(0, 10);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<JudgeScores> b;
    for (int i = 1; i <= 1 + trial % 8; ++i)
      b.push_back(v(i, s(rng) > 4, s(rng) / 2.0, s(rng) / 2.0, s(rng) / 2.0));
    const auto got = select_best(b);
    EXPECT_EQ(got.best, oracle::argmax_pass(b, 1.4, 0.8, 0.8, 3.0));
  }
}

TEST(Scores, FlaggedFailure) {
  EXPECT_TRUE(v(1, false, 3.5, 0, 0).flagged());
  EXPECT_FALSE(v(1, true, 5, 0, 0).flagged());
}

const std::string kGood1 =
    "Video 1: <score> 4.0 </score> | Status: Pass | TP: 4 | AS: 4 | SC: 4 | Reason: ok\n"
    "Video 2: <score> 1.0 </score> | Status: Fail | TP: 1 | AS: 1 | SC: 1 | Reason: no\n"
    "Best: Video 1\n";

std::vector<FrameSequence> two_candidates() {
  Frame f;
  f.image = Image(2, 2);
  return {FrameSequence{f, f}, FrameSequence{f, f}};
}

TEST(JudgeRun, RetriesOnceThenParses) {
  auto judge = ScriptedJudge::from_texts({"garbage", kGood1});
  const auto run = judge_candidates(judge, "go", two_candidates());
  EXPECT_EQ(judge.calls(), 2);
  EXPECT_EQ(run.errors.size(), 1u);
  EXPECT_TRUE(run.verdicts[0].pass);
  EXPECT_EQ(run.judge_best, 1);
}

TEST(JudgeRun, ExhaustedRetriesMarkFail) {
  auto judge = ScriptedJudge::from_texts({"garbage"});
  const auto run = judge_candidates(judge, "go", two_candidates());
  EXPECT_EQ(judge.calls(), 2);
  ASSERT_EQ(run.verdicts.size(), 2u);
  for (const auto& s : run.verdicts) EXPECT_FALSE(s.pass);
  EXPECT_TRUE(select_best(run.verdicts).escalated());
}

TEST(JudgeRun, PerCandidateMode) {
  auto judge = ScriptedJudge({{v(1, true, 4, 4, 4)}, {v(1, false, 2, 2, 2)}});
  JudgePolicy policy;
  policy.per_candidate = true;
  const auto run = judge_candidates(judge, "go", two_candidates(), policy);
  EXPECT_EQ(judge.calls(), 2);
  EXPECT_TRUE(run.verdicts[0].pass);
  EXPECT_FALSE(run.verdicts[1].pass);
  EXPECT_EQ(run.verdicts[1].video, 2);
}

}  // namespace
}  // namespace vidnav
