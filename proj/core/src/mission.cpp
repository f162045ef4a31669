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


#include "vidnav/mission.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json_codec.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"
#include "vidnav/pfm.hpp"
#include "vidnav/planner.hpp"

namespace vidnav {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kStateNames[] = {
    "created", "generating", "judging", "awaiting-supervisor", "selected",
    "decoding", "planning",  "executing", "done",               "aborted"};

json pose_json(const Pose& p) {
  json r = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.push_back(p.rotation(i, j));
  }
  return {{"position", {p.position.x(), p.position.y(), p.position.z()}}, {"rotation", r}};
}

Pose pose_from_json(const json& j) {
  Pose p;
  const auto pos = j.at("position").get<std::vector<double>>();
  const auto rot = j.at("rotation").get<std::vector<double>>();
  if (pos.size() != 3 || rot.size() != 9) throw Error(ErrorCode::kParse, "bad pose record");
  p.position = Vec3(pos[0], pos[1], pos[2]);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) p.rotation(i, k) = rot[static_cast<size_t>(i * 3 + k)];
  }
  return p;
}

std::string waypoints_text(std::span<const Waypoint> w) {
  std::ostringstream out;
  write_waypoints(out, w);
  return out.str();
}

WaypointSequence read_waypoints_file(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  return read_waypoints(in);
}

std::string round_name(int round) { return "round_" + std::to_string(round); }
std::string candidate_name(int id) { return "candidate_" + std::to_string(id); }

// Fresh, empty staging directory next to `target`.
fs::path fresh_staging(const fs::path& target) {
  fs::path staging = target;
  staging += ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  return staging;
}

void transition(Mission& m, MissionState to, std::string detail) {
  MissionEvent e;
  e.seq = static_cast<int>(m.history.size()) + 1;
  e.from = m.state;
  e.to = to;
  e.detail = std::move(detail);
  m.history.push_back(std::move(e));
  m.state = to;
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string fresh_id() {
  static std::mt19937_64 rng{std::random_device{}() ^
                             static_cast<std::uint64_t>(now_ms())};
  static std::mutex mu;
  std::lock_guard lock(mu);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "m%012llx",
                static_cast<unsigned long long>(rng() & 0xffffffffffffULL));
  return buf;
}

GenerationRequest request_for(const Mission& m, const PipelineConfig& c) {
  GenerationRequest r;
  r.instruction = m.instruction;
  r.task_family = m.task_family;
  r.prompt_level = m.prompt_level;
  r.prompt = m.prompt;
  r.seed = m.seed_base;
  r.duration = c.sampling.duration;
  r.fps = c.sampling.fps;
  return r;
}

double yaw_or(const Pose& pose, double fallback) {
  try {
    return yaw_from_pose(pose);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kYawDegenerate) throw;
    return fallback;
  }
}

OccupancyGrid planning_grid(std::span<const Waypoint> wps, const Pose& start,
                            const GridConfig& g, const SyntheticScene* scene) {
  Vec3 lo = start.position, hi = start.position;
  for (const Waypoint& w : wps) {
    lo = lo.cwiseMin(w.position());
    hi = hi.cwiseMax(w.position());
  }
  lo.array() -= g.margin;
  hi.array() += g.margin;
  std::array<int, 3> dims{};
  double cells = 1.0;
  for (int i = 0; i < 3; ++i) {
    dims[static_cast<size_t>(i)] = static_cast<int>(std::ceil((hi[i] - lo[i]) / g.resolution)) + 1;
    cells *= dims[static_cast<size_t>(i)];
  }
  if (cells > g.max_cells) {
    throw Error(ErrorCode::kConfig, "planning grid would need " +
                                        std::to_string(static_cast<long long>(cells)) +
                                        " cells; raise grid.resolution");
  }
  if (scene) return voxelize(*scene, lo, g.resolution, dims);
  return OccupancyGrid(lo, g.resolution, dims);
}

FrameSequence read_selected_frames(const fs::path& dir) {
  const json list = json::parse(read_text_file(dir / "frames.json"));
  FrameSequence frames;
  for (const json& f : list.at("frames")) {
    Frame frame;
    frame.index = f.at("index").get<int>();
    frame.t = f.at("t").get<double>();
    frame.image = read_png(dir / f.at("file").get<std::string>());
    frames.push_back(std::move(frame));
  }
  return frames;
}

json scale_json(const ScaleEstimate& s) { return json::parse(scale_report(s)); }

}  // namespace

std::string_view to_string(MissionState state) {
  return kStateNames[static_cast<size_t>(state)];
}

MissionState parse_mission_state(std::string_view name) {
  for (size_t i = 0; i < std::size(kStateNames); ++i) {
    if (kStateNames[i] == name) return static_cast<MissionState>(i);
  }
  throw Error(ErrorCode::kParse, "unknown mission state '" + std::string(name) + "'");
}

bool is_terminal(MissionState state) {
  return state == MissionState::kDone || state == MissionState::kAborted;
}

std::string_view to_string(DecisionAction action) {
  switch (action) {
    case DecisionAction::kResample: return "resample";
    case DecisionAction::kTerminate: return "terminate";
    case DecisionAction::kApproveOverride: return "approve-override";
  }
  return "unknown";
}

DecisionAction parse_decision_action(std::string_view name) {
  if (name == "resample") return DecisionAction::kResample;
  if (name == "terminate") return DecisionAction::kTerminate;
  if (name == "approve-override") return DecisionAction::kApproveOverride;
  throw Error(ErrorCode::kArgument, "unknown decision '" + std::string(name) + "'");
}

int Mission::resamples_recorded() const {
  return static_cast<int>(std::count_if(history.begin(), history.end(), [](const MissionEvent& e) {
    return e.from == MissionState::kAwaitingSupervisor && e.to == MissionState::kGenerating;
  }));
}

std::string mission_to_json(const Mission& m) {
  json candidates = json::array();
  for (const CandidateSummary& c : m.candidates) {
    json j{{"id", c.id},
           {"seed", c.seed},
           {"status", std::string(to_string(c.status))},
           {"frame_count", c.frame_count},
           {"note", c.note},
           {"verdict", c.verdict ? to_json_value(*c.verdict) : json(nullptr)},
           {"reward", c.reward ? json(*c.reward) : json(nullptr)},
           {"flagged", c.verdict ? c.verdict->flagged() : false}};
    candidates.push_back(std::move(j));
  }
  json history = json::array();
  for (const MissionEvent& e : m.history) {
    history.push_back({{"seq", e.seq},
                       {"from", std::string(to_string(e.from))},
                       {"to", std::string(to_string(e.to))},
                       {"detail", e.detail}});
  }
  json exec = nullptr;
  if (m.execution) {
    exec = {{"completed", m.execution->completed},
            {"max_tracking_error", m.execution->max_tracking_error},
            {"waypoints_reached", m.execution->waypoints_reached},
            {"duration", m.execution->duration}};
  }
  json doc{{"id", m.id},
           {"instruction", m.instruction},
           {"created_ms", m.created_ms},
           {"state", std::string(to_string(m.state))},
           {"resample_count", m.resample_count},
           {"seed_base", m.seed_base},
           {"task_family", m.task_family},
           {"prompt_level", std::string(to_string(m.prompt_level))},
           {"prompt", m.prompt},
           {"start_pose", pose_json(m.start_pose)},
           {"candidates", candidates},
           {"selected", m.selected ? json(*m.selected) : json(nullptr)},
           {"selected_reward", m.selected_reward ? json(*m.selected_reward) : json(nullptr)},
           {"override_used", m.override_used},
           {"scale", m.scale ? scale_json(*m.scale) : json(nullptr)},
           {"execution", exec},
           {"cause", m.cause},
           {"history", history},
           {"artifacts", m.artifacts}};
  return doc.dump(2);
}

Mission parse_mission(const std::string& text) {
  try {
    const json doc = json::parse(text);
    Mission m;
    m.id = doc.at("id").get<std::string>();
    m.instruction = doc.at("instruction").get<std::string>();
    m.created_ms = doc.at("created_ms").get<std::int64_t>();
    m.state = parse_mission_state(doc.at("state").get<std::string>());
    m.resample_count = doc.at("resample_count").get<int>();
    m.seed_base = doc.at("seed_base").get<std::int64_t>();
    m.task_family = doc.at("task_family").get<std::string>();
    m.prompt_level = parse_prompt_level(doc.at("prompt_level").get<std::string>());
    m.prompt = doc.at("prompt").get<std::string>();
    m.start_pose = pose_from_json(doc.at("start_pose"));
    for (const json& c : doc.at("candidates")) {
      CandidateSummary s;
      s.id = c.at("id").get<int>();
      s.seed = c.at("seed").get<std::int64_t>();
      s.status = parse_candidate_status(c.at("status").get<std::string>());
      s.frame_count = c.at("frame_count").get<int>();
      s.note = c.value("note", "");
      if (!c.at("verdict").is_null()) s.verdict = judge_scores_from_json(c.at("verdict"));
      if (!c.at("reward").is_null()) s.reward = c.at("reward").get<double>();
      m.candidates.push_back(std::move(s));
    }
    if (!doc.at("selected").is_null()) m.selected = doc.at("selected").get<int>();
    if (!doc.at("selected_reward").is_null()) {
      m.selected_reward = doc.at("selected_reward").get<double>();
    }
    m.override_used = doc.value("override_used", false);
    if (!doc.at("scale").is_null()) m.scale = parse_scale_report(doc.at("scale").dump());
    if (!doc.at("execution").is_null()) {
      const json& e = doc.at("execution");
      m.execution = ExecutionSummary{e.at("completed").get<bool>(),
                                     e.at("max_tracking_error").get<double>(),
                                     e.at("waypoints_reached").get<int>(),
                                     e.at("duration").get<double>()};
    }
    m.cause = doc.value("cause", "");
    for (const json& e : doc.at("history")) {
      m.history.push_back(MissionEvent{e.at("seq").get<int>(),
                                       parse_mission_state(e.at("from").get<std::string>()),
                                       parse_mission_state(e.at("to").get<std::string>()),
                                       e.value("detail", "")});
    }
    m.artifacts = doc.at("artifacts").get<std::map<std::string, std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("mission record: ") + e.what());
  }
}

MissionStore::MissionStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

fs::path MissionStore::dir(const std::string& id) const {
  // Ids are generated here; anything else could escape the store.
  const bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
  if (!ok) throw Error(ErrorCode::kArgument, "invalid mission id '" + id + "'");
  return root_ / id;
}

Image load_observation(const fs::path& path) {
  try {
    return read_png(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInput, "unreadable observation " + path.string() + ": " + e.what());
  }
}

Mission MissionStore::create(const std::string& instruction, const Image& observation,
                             const PipelineConfig& config, const Pose& start_pose) {
  if (instruction.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kInput, "instruction must not be empty");
  }
  if (observation.empty()) throw Error(ErrorCode::kInput, "observation image is empty");
  if (!start_pose.is_valid(1e-6)) throw Error(ErrorCode::kInput, "invalid start pose");
  config.validate();

  Mission m;
  m.instruction = instruction;
  m.created_ms = now_ms();
  m.seed_base = config.sampling.seed;
  m.task_family = config.sampling.task_family;
  m.prompt_level = config.sampling.prompt_level;
  m.start_pose = start_pose;
  m.artifacts["observation"] = "observation.png";
  m.artifacts["config"] = "config.json";

  // Populate a hidden directory, then rename it into place.
  for (int attempt = 0;; ++attempt) {
    m.id = fresh_id();
    if (!fs::exists(dir(m.id))) break;
    if (attempt > 100) throw Error(ErrorCode::kIo, "could not allocate a mission id");
  }
  const fs::path staging = root_ / (".new-" + m.id);
  fs::remove_all(staging);
  fs::create_directories(staging);
  write_png(staging / "observation.png", observation);
  write_file_atomic(staging / "config.json", config_to_json(config));
  write_file_atomic(staging / "mission.json", mission_to_json(m));
  fs::rename(staging, dir(m.id));
  return m;
}

Mission MissionStore::load(const std::string& id) const {
  const fs::path path = dir(id) / "mission.json";
  if (!fs::exists(path)) throw Error(ErrorCode::kArgument, "no mission '" + id + "'");
  return parse_mission(read_text_file(path));
}

bool MissionStore::exists(const std::string& id) const {
  try {
    return fs::exists(dir(id) / "mission.json");
  } catch (const Error&) {
    return false;
  }
}

void MissionStore::save(const Mission& mission) const {
  write_file_atomic(dir(mission.id) / "mission.json", mission_to_json(mission));
}

std::vector<std::string> MissionStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && name.front() != '.' && fs::exists(entry.path() / "mission.json")) {
      ids.push_back(name);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

PipelineConfig MissionStore::config(const std::string& id) const {
  return parse_config(read_text_file(dir(id) / "config.json"));
}

WaypointSequence to_world(std::span<const Waypoint> normalized, double scale,
                          const Pose& start) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kDomain, "scale must be positive");
  const double yaw0 = yaw_from_pose(start);
  WaypointSequence out;
  out.reserve(normalized.size());
  for (const Waypoint& w : normalized) {
    Waypoint o = w;
    o.set_position(start.position + start.rotation * (scale * w.position()));
    o.yaw = wrap_angle(yaw0 + w.yaw);
    out.push_back(o);
  }
  return out;
}

WaypointSequence load_mission_waypoints(const MissionStore& store, const std::string& id) {
  return read_waypoints_file(store.dir(id) / "geometry" / "waypoints.txt");
}

Trajectory load_mission_trajectory(const MissionStore& store, const std::string& id) {
  std::istringstream in(read_text_file(store.dir(id) / "plan" / "trajectory.txt"));
  return read_trajectory(in);
}

// --- Runner ----------------------------------------------------------------

MissionRunner::MissionRunner(MissionStore& store, AdapterSet adapters,
                             std::shared_ptr<const SyntheticScene> scene)
    : store_(store), adapters_(std::move(adapters)), scene_(std::move(scene)) {
  if (!adapters_.video || !adapters_.decoder || !adapters_.depth || !adapters_.judge) {
    throw Error(ErrorCode::kConfig, "mission runner needs video, decoder, depth and judge adapters");
  }
}

std::mutex& MissionRunner::lock_for(const std::string& id) {
  std::lock_guard lock(locks_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

Mission MissionRunner::advance(const std::string& id) {
  std::lock_guard lock(lock_for(id));
  Mission m = store_.load(id);
  if (m.state == MissionState::kAwaitingSupervisor) {
    throw Error(ErrorCode::kState, "mission " + id + " is waiting for a supervisor decision");
  }
  if (is_terminal(m.state)) {
    throw Error(ErrorCode::kState, "mission " + id + " is " + std::string(to_string(m.state)));
  }
  const PipelineConfig c = store_.config(id);
  try {
    switch (m.state) {
      case MissionState::kCreated: stage_prepare(m, c); break;
      case MissionState::kGenerating: stage_generate(m, c); break;
      case MissionState::kJudging: stage_judge(m, c); break;
      case MissionState::kSelected: stage_select(m, c); break;
      case MissionState::kDecoding: stage_decode(m, c); break;
      case MissionState::kPlanning: stage_plan(m, c); break;
      case MissionState::kExecuting: stage_execute(m, c); break;
      default: break;
    }
  } catch (const std::exception& e) {
    m.cause = e.what();
    transition(m, MissionState::kAborted, m.cause);
  }
  store_.save(m);
  return m;
}

Mission MissionRunner::run(const std::string& id, int max_steps) {
  Mission m = store_.load(id);
  for (int i = 0; i < max_steps && !is_terminal(m.state) &&
                  m.state != MissionState::kAwaitingSupervisor;
       ++i) {
    m = advance(id);
  }
  return m;
}

Mission MissionRunner::decide(const SupervisorDecision& d) {
  std::lock_guard lock(lock_for(d.mission_id));
  Mission m = store_.load(d.mission_id);
  if (m.state != MissionState::kAwaitingSupervisor) {
    throw Error(ErrorCode::kState, "mission " + m.id + " is " + std::string(to_string(m.state)) +
                                       "; decisions need awaiting-supervisor");
  }
  const PipelineConfig c = store_.config(m.id);
  switch (d.action) {
    case DecisionAction::kTerminate:
      m.cause = "terminated by supervisor";
      transition(m, MissionState::kAborted, m.cause);
      break;
    case DecisionAction::kResample:
      if (m.resample_count >= c.mission.max_resamples) {
        m.cause = std::string(to_string(ErrorCode::kBudgetExhausted));
        transition(m, MissionState::kAborted, m.cause);
        break;
      }
      m.resample_count += 1;
      m.seed_base = c.sampling.seed + m.resample_count * c.mission.resample_seed_stride;
      m.selected.reset();
      m.selected_reward.reset();
      stage_prepare(m, c);
      m.history.back().from = MissionState::kAwaitingSupervisor;
      m.history.back().detail = "resample " + std::to_string(m.resample_count);
      break;
    case DecisionAction::kApproveOverride: {
      if (!c.mission.allow_override) {
        throw Error(ErrorCode::kState, "approve-override is disabled (mission.allow_override)");
      }
      auto it = std::find_if(m.candidates.begin(), m.candidates.end(),
                             [&](const CandidateSummary& s) { return s.id == d.candidate; });
      if (it == m.candidates.end() || it->frame_count == 0) {
        throw Error(ErrorCode::kArgument,
                    "candidate " + std::to_string(d.candidate) + " has no frames to approve");
      }
      m.selected = it->id;
      m.selected_reward = it->reward;
      m.override_used = true;
      transition(m, MissionState::kSelected,
                 "supervisor override of candidate " + std::to_string(it->id));
      break;
    }
  }
  store_.save(m);
  return m;
}

void MissionRunner::stage_prepare(Mission& m, const PipelineConfig& c) {
  if (m.prompt.empty()) {
    m.prompt = build_prompt(request_for(m, c), load_templates(c.sampling),
                            adapters_.rewriter.get());
  }
  const GenerationRequest req = request_for(m, c);
  const fs::path target = store_.dir(m.id) / round_name(m.resample_count);
  const fs::path staging = fresh_staging(target);
  m.candidates.clear();
  for (int i = 1; i <= c.sampling.k; ++i) {
    CandidateVideo placeholder;
    placeholder.id = i;
    placeholder.seed = m.seed_base + i;
    placeholder.fps = c.sampling.fps;
    save_candidate(staging / candidate_name(i), placeholder, req);
    m.candidates.push_back(CandidateSummary{i, placeholder.seed, CandidateStatus::kUnjudged,
                                            0, {}, std::nullopt, std::nullopt});
  }
  replace_directory(staging, target);
  m.artifacts["round"] = round_name(m.resample_count);
  transition(m, MissionState::kGenerating,
             "prepared " + std::to_string(c.sampling.k) + " candidates");
}

void MissionRunner::stage_generate(Mission& m, const PipelineConfig& c) {
  GenerationRequest req = request_for(m, c);
  req.image = std::make_shared<const Image>(read_png(store_.dir(m.id) / "observation.png"));
  const auto videos =
      sample_candidates(req, c.sampling.k, *adapters_.video, c.sampling.parallelism);
  const fs::path target = store_.dir(m.id) / round_name(m.resample_count);
  const fs::path staging = fresh_staging(target);
  m.candidates.clear();
  int generated = 0;
  for (const CandidateVideo& v : videos) {
    save_candidate(staging / candidate_name(v.id), v, req);
    m.candidates.push_back(CandidateSummary{v.id, v.seed, v.status,
                                            static_cast<int>(v.frames.size()), v.note,
                                            std::nullopt, std::nullopt});
    generated += v.frames.empty() ? 0 : 1;
  }
  replace_directory(staging, target);
  transition(m, MissionState::kJudging,
             "generated " + std::to_string(generated) + " of " + std::to_string(videos.size()));
}

void MissionRunner::stage_judge(Mission& m, const PipelineConfig& c) {
  const fs::path round = store_.dir(m.id) / round_name(m.resample_count);
  std::vector<int> ids;
  std::vector<FrameSequence> batch;
  for (const CandidateSummary& s : m.candidates) {
    if (s.frame_count == 0) continue;
    const CandidateVideo v = load_candidate(round / candidate_name(s.id));
    ids.push_back(s.id);
    batch.push_back(downsample_frames(v, c.sampling.stride));
  }
  json record{{"raw", json::array()}, {"errors", json::array()}, {"verdicts", json::array()}};
  std::vector<JudgeScores> verdicts;
  std::optional<int> judge_pick;
  if (!batch.empty()) {
    JudgeRun run = judge_candidates(*adapters_.judge, m.instruction, batch, c.judge);
    for (JudgeScores& v : run.verdicts) {
      v.video = ids[static_cast<size_t>(v.video - 1)];
      verdicts.push_back(v);
    }
    if (run.judge_best) judge_pick = ids[static_cast<size_t>(*run.judge_best - 1)];
    record["raw"] = run.raw;
    record["errors"] = run.errors;
  }
  SelectionOutcome outcome;
  if (!verdicts.empty()) outcome = select_best(verdicts, c.judge.weights);

  for (CandidateSummary& s : m.candidates) {
    auto it = std::find_if(verdicts.begin(), verdicts.end(),
                           [&](const JudgeScores& v) { return v.video == s.id; });
    if (it == verdicts.end()) {
      s.status = CandidateStatus::kFail;
      continue;
    }
    s.verdict = *it;
    s.reward = reward(*it, c.judge.weights);
    s.status = it->pass ? CandidateStatus::kPass : CandidateStatus::kFail;
    record["verdicts"].push_back(to_json_value(*it));
  }
  record["judge_best"] = judge_pick ? json(*judge_pick) : json(nullptr);
  record["selected"] = outcome.best ? json(*outcome.best) : json(nullptr);
  write_file_atomic(round / "verdicts.json", record.dump(2));
  for (const CandidateSummary& s : m.candidates) {
    set_candidate_status(round / candidate_name(s.id), s.status);
  }
  m.artifacts["verdicts"] = round_name(m.resample_count) + "/verdicts.json";

  if (outcome.best) {
    m.selected = *outcome.best;
    m.selected_reward = outcome.reward;
    transition(m, MissionState::kSelected,
               "selected candidate " + std::to_string(*outcome.best));
  } else {
    transition(m, MissionState::kAwaitingSupervisor, "no valid candidate");
  }
}

void MissionRunner::stage_select(Mission& m, const PipelineConfig& c) {
  if (!m.selected) throw Error(ErrorCode::kState, "no selected candidate");
  const fs::path src =
      store_.dir(m.id) / round_name(m.resample_count) / candidate_name(*m.selected);
  const FrameSequence frames = downsample_frames(load_candidate(src), c.sampling.stride);
  const fs::path target = store_.dir(m.id) / "selected";
  const fs::path staging = fresh_staging(target);
  json list = json::array();
  for (const Frame& f : frames) {
    const std::string file = frame_filename(f.index);
    write_png(staging / file, f.image);
    list.push_back({{"index", f.index}, {"t", f.t}, {"file", file}});
  }
  write_file_atomic(staging / "frames.json",
                    json{{"candidate", *m.selected}, {"round", m.resample_count}, {"frames", list}}
                        .dump(2));
  replace_directory(staging, target);
  m.artifacts["selected"] = "selected";
  transition(m, MissionState::kDecoding,
             "downsampled " + std::to_string(frames.size()) + " frames");
}

void MissionRunner::stage_decode(Mission& m, const PipelineConfig& c) {
  const FrameSequence frames = read_selected_frames(store_.dir(m.id) / "selected");
  const GeometryDecodeResult decoded = adapters_.decoder->decode(frames);
  if (decoded.poses.size() != frames.size() || decoded.pointmaps.size() != frames.size()) {
    throw Error(ErrorCode::kShape, "decoder output does not match the frame count");
  }
  std::vector<GeometryFrame> geometry;
  for (size_t i = 0; i < frames.size(); ++i) {
    geometry.push_back(GeometryFrame{adapters_.depth->estimate(frames[i]), decoded.pointmaps[i]});
  }
  const ScaleEstimate estimate = estimate_scale(geometry, c.scale);

  WaypointSequence normalized;
  double yaw = 0.0;
  for (size_t i = 0; i < frames.size(); ++i) {
    yaw = yaw_or(decoded.poses[i], yaw);
    Waypoint w;
    w.t = frames[i].t;
    w.set_position(decoded.poses[i].position);
    w.yaw = yaw;
    normalized.push_back(w);
  }
  const WaypointSequence world = to_world(normalized, estimate.scale, m.start_pose);

  const fs::path target = store_.dir(m.id) / "geometry";
  const fs::path staging = fresh_staging(target);
  json poses = json::array();
  for (size_t i = 0; i < frames.size(); ++i) {
    poses.push_back(pose_json(decoded.poses[i]));
    char name[32];
    std::snprintf(name, sizeof(name), "depth_%03zu.pfm", i);
    write_pfm(staging / name, geometry[i].depth);
    std::snprintf(name, sizeof(name), "points_%03zu.pfm", i);
    write_pfm(staging / name, geometry[i].points);
  }
  write_file_atomic(staging / "poses.json", poses.dump(2));
  write_file_atomic(staging / "scale.json", scale_report(estimate));
  write_file_atomic(staging / "waypoints_normalized.txt", waypoints_text(normalized));
  write_file_atomic(staging / "waypoints.txt", waypoints_text(world));
  replace_directory(staging, target);
  m.scale = estimate;
  m.artifacts["geometry"] = "geometry";
  m.artifacts["waypoints"] = "geometry/waypoints.txt";
  char detail[64];
  std::snprintf(detail, sizeof(detail), "scale %.6g from %zu pixels", estimate.scale,
                estimate.valid_pixel_count);
  transition(m, MissionState::kPlanning, detail);
}

void MissionRunner::stage_plan(Mission& m, const PipelineConfig& c) {
  const WaypointSequence wps = load_mission_waypoints(store_, m.id);
  const OccupancyGrid grid = planning_grid(wps, m.start_pose, c.grid, scene_.get());
  const PlanResult plan = plan_mission(grid, wps, c.planner);

  const fs::path target = store_.dir(m.id) / "plan";
  const fs::path staging = fresh_staging(target);
  std::ostringstream traj;
  write_trajectory(traj, plan.trajectory);
  write_file_atomic(staging / "trajectory.txt", traj.str());
  write_file_atomic(staging / "grid.txt", write_grid(grid));
  json path = json::array();
  for (const Vec3& p : plan.path) path.push_back({p.x(), p.y(), p.z()});
  write_file_atomic(staging / "plan.json",
                    json{{"path", path},
                         {"vmax", plan.limits.vmax},
                         {"amax", plan.limits.amax},
                         {"clearance", plan.clearance},
                         {"duration", plan.trajectory.duration()}}
                        .dump(2));
  replace_directory(staging, target);
  m.artifacts["plan"] = "plan";
  m.artifacts["trajectory"] = "plan/trajectory.txt";
  char detail[96];
  std::snprintf(detail, sizeof(detail), "%zu samples over %.3f s", plan.trajectory.samples.size(),
                plan.trajectory.duration());
  transition(m, MissionState::kExecuting, detail);
}

void MissionRunner::stage_execute(Mission& m, const PipelineConfig& c) {
  const WaypointSequence wps = load_mission_waypoints(store_, m.id);
  const Trajectory traj = load_mission_trajectory(store_, m.id);
  DroneState start;
  start.position = m.start_pose.position;
  start.yaw = yaw_or(m.start_pose, 0.0);
  ExecutionConfig exec = c.execution;
  exec.switch_threshold = c.planner.switch_threshold;
  const ExecutionLog log = execute(traj, wps, start, exec);

  const fs::path target = store_.dir(m.id) / "execution";
  const fs::path staging = fresh_staging(target);
  write_file_atomic(staging / "log.json", execution_log_to_text(log));
  replace_directory(staging, target);
  m.artifacts["execution"] = "execution/log.json";
  m.execution = ExecutionSummary{log.completed, log.max_tracking_error,
                                 static_cast<int>(log.events.size()),
                                 log.states.empty() ? 0.0 : log.states.back().t};
  if (log.completed) {
    transition(m, MissionState::kDone, "all waypoints reached");
  } else {
    m.cause = "execution reached " + std::to_string(log.events.size()) + " of " +
              std::to_string(wps.size()) + " waypoints";
    transition(m, MissionState::kAborted, m.cause);
  }
}

}  // namespace vidnav
