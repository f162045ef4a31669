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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vidnav/adapters.hpp"
#include "vidnav/config.hpp"
#include "vidnav/geometry.hpp"
#include "vidnav/image.hpp"
#include "vidnav/judge.hpp"
#include "vidnav/scale.hpp"

namespace vidnav {

// A state names the stage the next advance() runs; AwaitingSupervisor,
// Done and Aborted wait for a decision or are final.
enum class MissionState {
  kCreated,
  kGenerating,
  kJudging,
  kAwaitingSupervisor,
  kSelected,
  kDecoding,
  kPlanning,
  kExecuting,
  kDone,
  kAborted,
};

std::string_view to_string(MissionState state);
MissionState parse_mission_state(std::string_view name);
bool is_terminal(MissionState state);

enum class DecisionAction { kResample, kTerminate, kApproveOverride };

std::string_view to_string(DecisionAction action);
DecisionAction parse_decision_action(std::string_view name);

struct SupervisorDecision {
  std::string mission_id;
  DecisionAction action = DecisionAction::kResample;
  int candidate = 0;  // for kApproveOverride
};

struct CandidateSummary {
  int id = 0;
  std::int64_t seed = 0;
  CandidateStatus status = CandidateStatus::kUnjudged;
  int frame_count = 0;
  std::string note;
  std::optional<JudgeScores> verdict;  // `video` holds the candidate id
  std::optional<double> reward;
};

struct MissionEvent {
  int seq = 0;
  MissionState from = MissionState::kCreated;
  MissionState to = MissionState::kCreated;
  std::string detail;
};

struct ExecutionSummary {
  bool completed = false;
  double max_tracking_error = 0.0;
  int waypoints_reached = 0;
  double duration = 0.0;
};

struct Mission {
  std::string id;
  std::string instruction;
  std::int64_t created_ms = 0;
  MissionState state = MissionState::kCreated;
  int resample_count = 0;
  std::int64_t seed_base = 0;
  std::string task_family;
  PromptLevel prompt_level = PromptLevel::kDecomposed;
  std::string prompt;
  Pose start_pose;  // world pose of the observation camera
  std::vector<CandidateSummary> candidates;  // current round
  std::optional<int> selected;
  std::optional<double> selected_reward;
  bool override_used = false;
  std::optional<ScaleEstimate> scale;
  std::optional<ExecutionSummary> execution;
  std::string cause;  // why the mission aborted
  std::vector<MissionEvent> history;
  // Artifact name -> path relative to the mission directory.
  std::map<std::string, std::string> artifacts;

  int resamples_recorded() const;
};

std::string mission_to_json(const Mission& mission);
Mission parse_mission(const std::string& text);

// One directory per mission under `root`:
//   mission.json, config.json, observation.png,
//   round_<r>/candidate_<i>/{frame_*.png, manifest.json}, round_<r>/verdicts.json,
//   selected/, geometry/, plan/, execution/
class MissionStore {
 public:
  explicit MissionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path dir(const std::string& id) const;

  // Throws kInput on an empty instruction or observation.
  Mission create(const std::string& instruction, const Image& observation,
                 const PipelineConfig& config, const Pose& start_pose = {});
  Mission load(const std::string& id) const;
  bool exists(const std::string& id) const;
  void save(const Mission& mission) const;
  std::vector<std::string> list() const;
  PipelineConfig config(const std::string& id) const;

 private:
  std::filesystem::path root_;
};

// Throws kInput when the file cannot be read as a PNG.
Image load_observation(const std::filesystem::path& path);

// Drives missions through their stages using one adapter set. Each stage
// writes its outputs into a staging directory that is swapped in before the
// mission record is rewritten, so a crash at any point leaves the previous
// state intact and the stage simply reruns.
class MissionRunner {
 public:
  // `scene` is optional; when present it supplies the planning map.
  MissionRunner(MissionStore& store, AdapterSet adapters,
                std::shared_ptr<const SyntheticScene> scene = nullptr);

  // Runs exactly one stage. Throws kState from waiting or final states.
  Mission advance(const std::string& id);
  // Throws kState unless the mission awaits its supervisor.
  Mission decide(const SupervisorDecision& decision);
  // Advances until Done, Aborted or AwaitingSupervisor.
  Mission run(const std::string& id, int max_steps = 64);

  MissionStore& store() { return store_; }

 private:
  std::mutex& lock_for(const std::string& id);

  void stage_prepare(Mission& m, const PipelineConfig& c);
  void stage_generate(Mission& m, const PipelineConfig& c);
  void stage_judge(Mission& m, const PipelineConfig& c);
  void stage_select(Mission& m, const PipelineConfig& c);
  void stage_decode(Mission& m, const PipelineConfig& c);
  void stage_plan(Mission& m, const PipelineConfig& c);
  void stage_execute(Mission& m, const PipelineConfig& c);

  MissionStore& store_;
  AdapterSet adapters_;
  std::shared_ptr<const SyntheticScene> scene_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

// Selected-video waypoints (decoder units, first-frame body frame) to world
// metric waypoints: scaled by `scale`, then placed at `start`.
WaypointSequence to_world(std::span<const Waypoint> normalized, double scale,
                          const Pose& start);

// Reads the final world waypoints and trajectory of a finished stage.
WaypointSequence load_mission_waypoints(const MissionStore& store, const std::string& id);
Trajectory load_mission_trajectory(const MissionStore& store, const std::string& id);

}  // namespace vidnav
