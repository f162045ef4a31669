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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vidnav/adapters.hpp"
#include "vidnav/candidates.hpp"
#include "vidnav/judge.hpp"
#include "vidnav/planner.hpp"
#include "vidnav/scale.hpp"
#include "vidnav/simulator.hpp"

namespace vidnav {

struct SamplingConfig {
  int k = 5;
  int stride = 8;
  double fps = 16.0;
  double duration = 5.0;
  PromptLevel prompt_level = PromptLevel::kDecomposed;
  std::string task_family = "generic";
  std::string templates_file;  // optional JSON overriding the built-ins
  int parallelism = 4;
  std::int64_t seed = 0;
};

// Free-space grid built around the waypoints when no map is known.
struct GridConfig {
  double resolution = 0.25;
  double margin = 1.5;
  int max_cells = 4'000'000;
};

struct MissionPolicy {
  int max_resamples = 3;
  bool allow_override = false;
  std::int64_t resample_seed_stride = 1000;
};

enum class MockJudgeMode { kScripted, kStochastic };

struct MockAdapterConfig {
  std::string scene;  // scene file; relative paths resolve against the config
  MockOptions options;
  MockJudgeMode judge = MockJudgeMode::kStochastic;
  double pass_probability = 1.0;
  std::uint64_t judge_seed = 7;
  std::vector<std::vector<JudgeScores>> judge_script;
  bool rewriter = true;
};

struct AdaptersConfig {
  bool mock = true;
  MockAdapterConfig mock_config;
  AdapterConfig video;
  AdapterConfig decoder;
  AdapterConfig depth;
  AdapterConfig judge;
  AdapterConfig rewriter;  // empty endpoint: no wire rewriter
};

struct PipelineConfig {
  SamplingConfig sampling;
  JudgePolicy judge;
  ScaleConfig scale;
  PlannerConfig planner;
  ExecutionConfig execution;
  GridConfig grid;
  MissionPolicy mission;
  AdaptersConfig adapters;

  // Throws kConfig.
  void validate() const;
};

// Unknown keys are rejected so typos surface early.
PipelineConfig parse_config(const std::string& json_text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

// Mock adapters need `scene`; wire adapters ignore it.
AdapterSet make_adapters(const PipelineConfig& config,
                         std::shared_ptr<const SyntheticScene> scene);

PromptTemplates load_templates(const SamplingConfig& config);

}  // namespace vidnav
