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

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "vidnav/config.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

namespace vidnav {
namespace {

void expect_config_error(const std::string& text) {
  try {
    parse_config(text);
    FAIL() << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig) << text;
  }
}

TEST(Config, ExampleFileLoads) {
  const auto c = load_config(fixture::data_dir() / "config.json");
  EXPECT_EQ(c.sampling.k, 5);
  EXPECT_EQ(c.sampling.prompt_level, PromptLevel::kDecomposed);
  EXPECT_TRUE(c.adapters.mock);
  EXPECT_DOUBLE_EQ(c.adapters.mock_config.pass_probability, 0.6);
  // Scene path resolves next to the config file.
  EXPECT_TRUE(std::filesystem::exists(c.adapters.mock_config.scene));
  EXPECT_EQ(c.adapters.video.auth_token_env, "VIDNAV_VIDEO_TOKEN");
  // Tokens never live in config: only the variable name does.
  EXPECT_EQ(config_to_json(c).find("Bearer"), std::string::npos);
}

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.sampling.k, 5);
  EXPECT_EQ(c.sampling.stride, 8);
  EXPECT_DOUBLE_EQ(c.judge.weights.w_tp, 1.4);
  EXPECT_DOUBLE_EQ(c.judge.weights.normalizer, 3.0);
  EXPECT_DOUBLE_EQ(c.scale.tau_min, 0.5);
  EXPECT_DOUBLE_EQ(c.scale.tau_max, 30.0);
  EXPECT_EQ(c.scale.pixel_stride, 4);
  EXPECT_DOUBLE_EQ(c.planner.switch_threshold, 0.5);

  auto m = c;
  m.sampling.k = 8;
  m.scale.consensus = Consensus::kMean;
  m.adapters.mock_config.judge = MockJudgeMode::kScripted;
  m.adapters.mock_config.judge_script = {{{1, true, 4.0, 4.0, 4.0, 4.0, "ok"}}};
  m.judge.per_candidate = true;
  const auto back = parse_config(config_to_json(m));
  EXPECT_EQ(back.sampling.k, 8);
  EXPECT_EQ(back.scale.consensus, Consensus::kMean);
  EXPECT_TRUE(back.judge.per_candidate);
  ASSERT_EQ(back.adapters.mock_config.judge_script.size(), 1u);
  EXPECT_EQ(back.adapters.mock_config.judge_script[0][0],
            m.adapters.mock_config.judge_script[0][0]);
  EXPECT_EQ(config_to_json(back), config_to_json(m));
}

TEST(Config, Rejections) {
  expect_config_error("{not json");
  expect_config_error(R"({"sampling": {"k": 0}})");
  expect_config_error(R"({"sampling": {"kk": 3}})");
  expect_config_error(R"({"bogus": {}})");
  expect_config_error(R"({"scale": {"consensus": "mode"}})");
  expect_config_error(R"({"judge": {"normalizer": 0}})");
  expect_config_error(R"({"adapters": {"mode": "cloud"}})");
  expect_config_error(R"({"adapters": {"mock": {"pass_probability": 1.5}}})");
  expect_config_error(R"({"adapters": {"mock": {"judge": "scripted"}}})");
  expect_config_error(R"({"adapters": {"mode": "wire"}})");
  expect_config_error(R"({"sampling": {"k": "five"}})");
}

TEST(Config, MakeAdapters) {
  auto c = fixture::mock_config();
  const auto set = make_adapters(c, fixture::golden_scene());
  EXPECT_TRUE(set.video && set.decoder && set.depth && set.judge && set.rewriter);
  EXPECT_THROW(make_adapters(c, nullptr), Error);

  c.adapters.mock = false;
  c.adapters.video.endpoint = c.adapters.decoder.endpoint = c.adapters.depth.endpoint =
      c.adapters.judge.endpoint = "http://127.0.0.1:1";
  const auto wire = make_adapters(c, nullptr);
  EXPECT_TRUE(wire.video && wire.judge);
  EXPECT_FALSE(wire.rewriter);
}

TEST(Config, TemplatesFileOverridesBuiltins) {
  const auto dir = oracle::temp_dir("tmpl");
  write_file_atomic(dir / "t.json",
                    std::string_view(R"({"circle_tree": {"simple": "spin", "kinematic": "k",
                                        "decomposed": "d"}})"));
  const auto c = parse_config(R"({"sampling": {"templates_file": "t.json"}})", dir);
  const auto t = load_templates(c.sampling);
  EXPECT_EQ(*t.find("circle_tree", PromptLevel::kSimple), "spin");
  EXPECT_NE(t.find("generic", PromptLevel::kSimple), nullptr);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace vidnav
