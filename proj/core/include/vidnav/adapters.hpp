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
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "vidnav/candidates.hpp"
#include "vidnav/geometry.hpp"
#include "vidnav/image.hpp"
#include "vidnav/judge.hpp"
#include "vidnav/simulator.hpp"

namespace vidnav {

struct AdapterConfig {
  std::string endpoint;        // http://host:port[/prefix]
  std::string auth_token_env;  // name of the variable holding the token
  double timeout = 180.0;      // seconds per attempt
  int max_retries = 3;
  int parallelism = 4;
  double backoff_base = 1.0;
  double backoff_factor = 2.0;
  double backoff_jitter = 0.2;  // relative, uniform
  double backoff_cap = 30.0;

  // Throws kConfig.
  void validate() const;
  // Delay before retry `attempt` (1-based); `u` is a uniform draw in [0, 1).
  double backoff_delay(int attempt, double u) const;
};

struct GeometryDecodeResult {
  std::vector<Pose> poses;  // relative to the first frame, decoder units
  std::vector<PointMap> pointmaps;
};

class VideoGenClient {
 public:
  virtual ~VideoGenClient() = default;
  // Frames at request.fps over request.duration; the returned id is left
  // for the caller to assign.
  virtual CandidateVideo generate(const GenerationRequest& request) = 0;
};

class GeometryDecoderClient {
 public:
  virtual ~GeometryDecoderClient() = default;
  virtual GeometryDecodeResult decode(const FrameSequence& frames) = 0;
};

class MetricDepthClient {
 public:
  virtual ~MetricDepthClient() = default;
  virtual DepthMap estimate(const Frame& frame) = 0;
};

class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual std::string rank(const std::string& prompt,
                           const std::vector<FrameSequence>& candidates) = 0;
};

class PromptRewriter {
 public:
  virtual ~PromptRewriter() = default;
  virtual std::string rewrite(std::string_view prompt,
                              std::string_view instruction) = 0;
};

// --- Mocks -----------------------------------------------------------------
//
// The mocks replay a synthetic scene. Video time [0, clip_duration] maps
// linearly onto the span of the scene's ground-truth trajectory.

struct MockOptions {
  int width = 160;
  int height = 120;
  double clip_duration = 5.0;
  double scale_override = 0.0;  // decoder λ; 0 keeps the scene's gt_scale
};

double scene_time(const SyntheticScene& scene, double video_t, double clip_duration);
// Pose and rendered view at the start of the ground-truth trajectory.
Pose mock_start_pose(const SyntheticScene& scene);
Image mock_observation(const SyntheticScene& scene, const MockOptions& options = {});

class MockVideoGen : public VideoGenClient {
 public:
  MockVideoGen(std::shared_ptr<const SyntheticScene> scene, MockOptions options = {});
  CandidateVideo generate(const GenerationRequest& request) override;

 private:
  std::shared_ptr<const SyntheticScene> scene_;
  MockOptions options_;
};

class MockGeometryDecoder : public GeometryDecoderClient {
 public:
  MockGeometryDecoder(std::shared_ptr<const SyntheticScene> scene,
                      MockOptions options = {});
  GeometryDecodeResult decode(const FrameSequence& frames) override;

 private:
  SyntheticScene scene_;
  MockOptions options_;
};

class MockMetricDepth : public MetricDepthClient {
 public:
  MockMetricDepth(std::shared_ptr<const SyntheticScene> scene, MockOptions options = {});
  DepthMap estimate(const Frame& frame) override;

 private:
  std::shared_ptr<const SyntheticScene> scene_;
  MockOptions options_;
};

// Replies from a fixture table. Each judge call consumes the next round;
// the last round repeats once the script runs out.
class ScriptedJudge : public JudgeClient {
 public:
  explicit ScriptedJudge(std::vector<std::vector<JudgeScores>> rounds);
  static ScriptedJudge from_texts(std::vector<std::string> responses);

  std::string rank(const std::string& prompt,
                   const std::vector<FrameSequence>& candidates) override;
  int calls() const { return calls_; }

 private:
  ScriptedJudge() = default;
  std::vector<std::vector<JudgeScores>> rounds_;
  std::vector<std::string> texts_;
  int calls_ = 0;
};

// Each candidate passes with probability p. The draw hashes the judge seed
// with the candidate's frame digests, so it is a pure function of content.
class StochasticJudge : public JudgeClient {
 public:
  StochasticJudge(double p, std::uint64_t seed);
  std::string rank(const std::string& prompt,
                   const std::vector<FrameSequence>& candidates) override;

 private:
  double p_;
  std::uint64_t seed_;
};

class MockPromptRewriter : public PromptRewriter {
 public:
  std::string rewrite(std::string_view prompt, std::string_view instruction) override;
};

// --- HTTP clients ----------------------------------------------------------
//
// JSON over HTTP POST. Images travel as base64 PNG, maps as base64 PFM.
//   /generate {prompt, instruction, seed, duration, fps, image}
//             -> {frames: [png...]}
//   /decode   {frames: [{index, t, image}...]} -> {poses: [[12 numbers]...],
//             pointmaps: [pfm...]}; a pose is row-major R then t
//   /depth    {index, t, image} -> {depth: pfm}
//   /rank     {prompt, candidates: [[png...]...]} -> {text}
//   /rewrite  {prompt, instruction} -> {text}

class HttpTransport;

class HttpVideoGen : public VideoGenClient {
 public:
  explicit HttpVideoGen(AdapterConfig config);
  ~HttpVideoGen() override;
  CandidateVideo generate(const GenerationRequest& request) override;

 private:
  std::unique_ptr<HttpTransport> transport_;
};

class HttpGeometryDecoder : public GeometryDecoderClient {
 public:
  explicit HttpGeometryDecoder(AdapterConfig config);
  ~HttpGeometryDecoder() override;
  GeometryDecodeResult decode(const FrameSequence& frames) override;

 private:
  std::unique_ptr<HttpTransport> transport_;
};

class HttpMetricDepth : public MetricDepthClient {
 public:
  explicit HttpMetricDepth(AdapterConfig config);
  ~HttpMetricDepth() override;
  DepthMap estimate(const Frame& frame) override;

 private:
  std::unique_ptr<HttpTransport> transport_;
};

class HttpJudge : public JudgeClient {
 public:
  explicit HttpJudge(AdapterConfig config);
  ~HttpJudge() override;
  std::string rank(const std::string& prompt,
                   const std::vector<FrameSequence>& candidates) override;

 private:
  std::unique_ptr<HttpTransport> transport_;
};

class HttpPromptRewriter : public PromptRewriter {
 public:
  explicit HttpPromptRewriter(AdapterConfig config);
  ~HttpPromptRewriter() override;
  std::string rewrite(std::string_view prompt, std::string_view instruction) override;

 private:
  std::unique_ptr<HttpTransport> transport_;
};

struct AdapterSet {
  std::shared_ptr<VideoGenClient> video;
  std::shared_ptr<GeometryDecoderClient> decoder;
  std::shared_ptr<MetricDepthClient> depth;
  std::shared_ptr<JudgeClient> judge;
  std::shared_ptr<PromptRewriter> rewriter;  // may be null
};

}  // namespace vidnav
