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


#include <algorithm>
#include <cmath>

#include "vidnav/adapters.hpp"
#include "vidnav/error.hpp"

namespace vidnav {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

double one_decimal(double v) { return std::round(v * 10.0) / 10.0; }

std::shared_ptr<const SyntheticScene> checked(std::shared_ptr<const SyntheticScene> scene) {
  if (!scene) throw Error(ErrorCode::kConfig, "mock adapter needs a scene");
  return scene;
}

void check_options(const MockOptions& o) {
  if (o.width < 1 || o.height < 1 || !(o.clip_duration > 0.0) || o.scale_override < 0.0) {
    throw Error(ErrorCode::kConfig, "invalid mock adapter options");
  }
}

int judge_best(const std::vector<JudgeScores>& verdicts) {
  int best = verdicts.empty() ? 1 : verdicts.front().video;
  double top = -1.0;
  for (const JudgeScores& s : verdicts) {
    if (s.pass && s.total > top) {
      top = s.total;
      best = s.video;
    }
  }
  return best;
}

}  // namespace

double scene_time(const SyntheticScene& scene, double video_t, double clip_duration) {
  if (scene.gt_trajectory.empty()) return 0.0;
  const double t0 = scene.gt_trajectory.front().t;
  const double t1 = scene.gt_trajectory.back().t;
  const double f = std::clamp(video_t / clip_duration, 0.0, 1.0);
  return t0 + f * (t1 - t0);
}

Pose mock_start_pose(const SyntheticScene& scene) {
  return scene.pose_at(scene.gt_trajectory.empty() ? 0.0 : scene.gt_trajectory.front().t);
}

Image mock_observation(const SyntheticScene& scene, const MockOptions& options) {
  return render_frame(scene, mock_start_pose(scene), options.width, options.height, 0);
}

MockVideoGen::MockVideoGen(std::shared_ptr<const SyntheticScene> scene, MockOptions options)
    : scene_(checked(std::move(scene))), options_(options) {
  check_options(options_);
}

CandidateVideo MockVideoGen::generate(const GenerationRequest& request) {
  request.validate();
  CandidateVideo video;
  video.seed = request.seed;
  video.fps = request.fps;
  const int n = request.frame_count();
  video.frames.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = scene_time(*scene_, i / request.fps, request.duration);
    const std::uint64_t seed =
        splitmix(static_cast<std::uint64_t>(request.seed) ^ splitmix(static_cast<std::uint64_t>(i)));
    video.frames.push_back(
        render_frame(*scene_, scene_->pose_at(t), options_.width, options_.height, seed));
  }
  return video;
}

MockGeometryDecoder::MockGeometryDecoder(std::shared_ptr<const SyntheticScene> scene,
                                         MockOptions options)
    : scene_(*checked(std::move(scene))), options_(options) {
  check_options(options_);
  if (options_.scale_override > 0.0) scene_.gt_scale = options_.scale_override;
}

GeometryDecodeResult MockGeometryDecoder::decode(const FrameSequence& frames) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::kArgument, "geometry decoding needs at least 2 frames");
  }
  GeometryDecodeResult out;
  const Pose first = scene_.pose_at(scene_time(scene_, frames.front().t, options_.clip_duration));
  for (const Frame& f : frames) {
    if (f.image.empty()) throw Error(ErrorCode::kArgument, "empty frame");
    const Pose pose = scene_.pose_at(scene_time(scene_, f.t, options_.clip_duration));
    Pose rel = first.relative(pose);
    rel.position /= scene_.gt_scale;
    out.poses.push_back(rel);
    out.pointmaps.push_back(
        render_ground_truth(scene_, pose, f.image.width, f.image.height).points);
  }
  return out;
}

MockMetricDepth::MockMetricDepth(std::shared_ptr<const SyntheticScene> scene,
                                 MockOptions options)
    : scene_(checked(std::move(scene))), options_(options) {
  check_options(options_);
}

DepthMap MockMetricDepth::estimate(const Frame& frame) {
  if (frame.image.empty() ||
      frame.image.rgb.size() != static_cast<size_t>(frame.image.width) * frame.image.height * 3) {
    throw Error(ErrorCode::kArgument, "invalid image");
  }
  const Pose pose = scene_->pose_at(scene_time(*scene_, frame.t, options_.clip_duration));
  GeometryFrame g = render_ground_truth(*scene_, pose, frame.image.width, frame.image.height);
  apply_depth_noise(g.depth, g.points, scene_->noise, static_cast<std::uint64_t>(frame.index));
  return g.depth;
}

ScriptedJudge::ScriptedJudge(std::vector<std::vector<JudgeScores>> rounds)
    : rounds_(std::move(rounds)) {
  if (rounds_.empty()) throw Error(ErrorCode::kConfig, "scripted judge needs a round");
}

ScriptedJudge ScriptedJudge::from_texts(std::vector<std::string> responses) {
  if (responses.empty()) throw Error(ErrorCode::kConfig, "scripted judge needs a response");
  ScriptedJudge j;
  j.texts_ = std::move(responses);
  return j;
}

std::string ScriptedJudge::rank(const std::string&,
                                const std::vector<FrameSequence>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kArgument, "nothing to rank");
  const size_t call = static_cast<size_t>(calls_++);
  if (!texts_.empty()) return texts_[std::min(call, texts_.size() - 1)];
  const auto& round = rounds_[std::min(call, rounds_.size() - 1)];
  // Videos missing from the fixture get a plain Fail line.
  JudgeOutput out;
  for (int n = 1; n <= static_cast<int>(candidates.size()); ++n) {
    auto it = std::find_if(round.begin(), round.end(),
                           [n](const JudgeScores& s) { return s.video == n; });
    if (it != round.end()) {
      out.verdicts.push_back(*it);
    } else {
      out.verdicts.push_back(JudgeScores{n, false, 1.0, 1.0, 1.0, 1.0, "not in fixture"});
    }
  }
  out.best = judge_best(out.verdicts);
  return format_judge_output(out);
}

StochasticJudge::StochasticJudge(double p, std::uint64_t seed) : p_(p), seed_(seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kConfig, "pass probability outside [0, 1]");
}

std::string StochasticJudge::rank(const std::string&,
                                  const std::vector<FrameSequence>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kArgument, "nothing to rank");
  JudgeOutput out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    std::uint64_t h = splitmix(seed_);
    for (const Frame& f : candidates[i]) h = splitmix(h ^ digest(f.image));
    JudgeScores s;
    s.video = static_cast<int>(i) + 1;
    s.pass = unit(h) < p_;
    const double base = s.pass ? 3.0 : 0.5;
    s.tp = one_decimal(base + 2.0 * unit(splitmix(h + 1)));
    s.as = one_decimal(base + 2.0 * unit(splitmix(h + 2)));
    s.sc = one_decimal(base + 2.0 * unit(splitmix(h + 3)));
    s.total = one_decimal(reward(s));
    s.reason = s.pass ? "sampled pass" : "sampled fail";
    out.verdicts.push_back(std::move(s));
  }
  out.best = judge_best(out.verdicts);
  return format_judge_output(out);
}

std::string MockPromptRewriter::rewrite(std::string_view, std::string_view instruction) {
  return "First-person perspective drone footage. Task: " + std::string(instruction) +
         " The camera moves steadily at a constant height along a single continuous path "
         "and ends in a clear, stable stop. Every object in the scene stays static and "
         "consistent.";
}

}  // namespace vidnav
