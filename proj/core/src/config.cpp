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


#include "vidnav/config.hpp"

#include "json_codec.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

namespace vidnav {
namespace {

using nlohmann::json;

void read_adapter(const json& doc, const char* key, AdapterConfig& a) {
  if (!doc.contains(key)) return;
  const json& o = doc.at(key);
  check_keys(o, std::string("adapters.") + key,
             {"endpoint", "auth_token_env", "timeout", "max_retries", "parallelism",
              "backoff_base", "backoff_factor", "backoff_jitter", "backoff_cap"});
  read_opt(o, "endpoint", a.endpoint);
  read_opt(o, "auth_token_env", a.auth_token_env);
  read_opt(o, "timeout", a.timeout);
  read_opt(o, "max_retries", a.max_retries);
  read_opt(o, "parallelism", a.parallelism);
  read_opt(o, "backoff_base", a.backoff_base);
  read_opt(o, "backoff_factor", a.backoff_factor);
  read_opt(o, "backoff_jitter", a.backoff_jitter);
  read_opt(o, "backoff_cap", a.backoff_cap);
}

json adapter_json(const AdapterConfig& a) {
  return {{"endpoint", a.endpoint},
          {"auth_token_env", a.auth_token_env},
          {"timeout", a.timeout},
          {"max_retries", a.max_retries},
          {"parallelism", a.parallelism},
          {"backoff_base", a.backoff_base},
          {"backoff_factor", a.backoff_factor},
          {"backoff_jitter", a.backoff_jitter},
          {"backoff_cap", a.backoff_cap}};
}

PipelineConfig parse_doc(const json& doc, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  check_keys(doc, "config",
             {"sampling", "judge", "scale", "planner", "execution", "grid", "mission",
              "adapters"});
  if (doc.contains("sampling")) {
    const json& o = doc.at("sampling");
    check_keys(o, "sampling",
               {"k", "stride", "fps", "duration", "prompt_level", "task_family",
                "templates_file", "parallelism", "seed"});
    auto& s = c.sampling;
    read_opt(o, "k", s.k);
    read_opt(o, "stride", s.stride);
    read_opt(o, "fps", s.fps);
    read_opt(o, "duration", s.duration);
    if (o.contains("prompt_level")) {
      s.prompt_level = parse_prompt_level(o.at("prompt_level").get<std::string>());
    }
    read_opt(o, "task_family", s.task_family);
    read_opt(o, "templates_file", s.templates_file);
    if (!s.templates_file.empty() && !base_dir.empty() &&
        std::filesystem::path(s.templates_file).is_relative()) {
      s.templates_file = (base_dir / s.templates_file).string();
    }
    read_opt(o, "parallelism", s.parallelism);
    read_opt(o, "seed", s.seed);
  }
  if (doc.contains("judge")) {
    const json& o = doc.at("judge");
    check_keys(o, "judge", {"w_as", "w_sc", "w_tp", "normalizer", "retries", "per_candidate"});
    read_opt(o, "w_as", c.judge.weights.w_as);
    read_opt(o, "w_sc", c.judge.weights.w_sc);
    read_opt(o, "w_tp", c.judge.weights.w_tp);
    read_opt(o, "normalizer", c.judge.weights.normalizer);
    read_opt(o, "retries", c.judge.retries);
    read_opt(o, "per_candidate", c.judge.per_candidate);
  }
  if (doc.contains("scale")) {
    const json& o = doc.at("scale");
    check_keys(o, "scale", {"tau_min", "tau_max", "min_valid_pixels", "pixel_stride", "consensus"});
    read_opt(o, "tau_min", c.scale.tau_min);
    read_opt(o, "tau_max", c.scale.tau_max);
    read_opt(o, "min_valid_pixels", c.scale.min_valid_pixels);
    read_opt(o, "pixel_stride", c.scale.pixel_stride);
    if (o.contains("consensus")) {
      const auto v = o.at("consensus").get<std::string>();
      if (v == "median") {
        c.scale.consensus = Consensus::kMedian;
      } else if (v == "mean") {
        c.scale.consensus = Consensus::kMean;
      } else {
        throw Error(ErrorCode::kConfig, "scale.consensus must be median or mean");
      }
    }
  }
  if (doc.contains("planner")) {
    const json& o = doc.at("planner");
    check_keys(o, "planner",
               {"switch_threshold", "clearance", "dt", "max_yaw_rate", "corner_angle",
                "v_floor", "a_floor", "a_fallback"});
    auto& p = c.planner;
    read_opt(o, "switch_threshold", p.switch_threshold);
    read_opt(o, "clearance", p.clearance);
    read_opt(o, "dt", p.dt);
    read_opt(o, "max_yaw_rate", p.max_yaw_rate);
    read_opt(o, "corner_angle", p.corner_angle);
    read_opt(o, "v_floor", p.floors.v_floor);
    read_opt(o, "a_floor", p.floors.a_floor);
    read_opt(o, "a_fallback", p.floors.a_fallback);
  }
  if (doc.contains("execution")) {
    const json& o = doc.at("execution");
    check_keys(o, "execution", {"dt", "settle_time", "bandwidth", "accel_noise", "seed"});
    auto& e = c.execution;
    read_opt(o, "dt", e.dt);
    read_opt(o, "settle_time", e.settle_time);
    read_opt(o, "bandwidth", e.tracking.bandwidth);
    read_opt(o, "accel_noise", e.tracking.accel_noise);
    read_opt(o, "seed", e.tracking.seed);
  }
  c.execution.switch_threshold = c.planner.switch_threshold;
  if (doc.contains("grid")) {
    const json& o = doc.at("grid");
    check_keys(o, "grid", {"resolution", "margin", "max_cells"});
    read_opt(o, "resolution", c.grid.resolution);
    read_opt(o, "margin", c.grid.margin);
    read_opt(o, "max_cells", c.grid.max_cells);
  }
  if (doc.contains("mission")) {
    const json& o = doc.at("mission");
    check_keys(o, "mission", {"max_resamples", "allow_override", "resample_seed_stride"});
    read_opt(o, "max_resamples", c.mission.max_resamples);
    read_opt(o, "allow_override", c.mission.allow_override);
    read_opt(o, "resample_seed_stride", c.mission.resample_seed_stride);
  }
  if (doc.contains("adapters")) {
    const json& o = doc.at("adapters");
    check_keys(o, "adapters", {"mode", "mock", "video", "decoder", "depth", "judge", "rewriter"});
    if (o.contains("mode")) {
      const auto mode = o.at("mode").get<std::string>();
      if (mode != "mock" && mode != "wire") {
        throw Error(ErrorCode::kConfig, "adapters.mode must be mock or wire");
      }
      c.adapters.mock = mode == "mock";
    }
    if (o.contains("mock")) {
      const json& m = o.at("mock");
      check_keys(m, "adapters.mock",
                 {"scene", "width", "height", "scale_override", "judge", "pass_probability",
                  "judge_seed", "judge_script", "rewriter"});
      auto& mc = c.adapters.mock_config;
      read_opt(m, "scene", mc.scene);
      if (!mc.scene.empty() && !base_dir.empty() &&
          std::filesystem::path(mc.scene).is_relative()) {
        mc.scene = (base_dir / mc.scene).string();
      }
      read_opt(m, "width", mc.options.width);
      read_opt(m, "height", mc.options.height);
      read_opt(m, "scale_override", mc.options.scale_override);
      if (m.contains("judge")) {
        const auto j = m.at("judge").get<std::string>();
        if (j == "scripted") {
          mc.judge = MockJudgeMode::kScripted;
        } else if (j == "stochastic") {
          mc.judge = MockJudgeMode::kStochastic;
        } else {
          throw Error(ErrorCode::kConfig, "adapters.mock.judge must be scripted or stochastic");
        }
      }
      read_opt(m, "pass_probability", mc.pass_probability);
      read_opt(m, "judge_seed", mc.judge_seed);
      if (m.contains("judge_script")) {
        for (const json& round : m.at("judge_script")) {
          std::vector<JudgeScores> r;
          for (const json& v : round) r.push_back(judge_scores_from_json(v));
          mc.judge_script.push_back(std::move(r));
        }
      }
      read_opt(m, "rewriter", mc.rewriter);
    }
    read_adapter(o, "video", c.adapters.video);
    read_adapter(o, "decoder", c.adapters.decoder);
    read_adapter(o, "depth", c.adapters.depth);
    read_adapter(o, "judge", c.adapters.judge);
    read_adapter(o, "rewriter", c.adapters.rewriter);
  }
  c.adapters.mock_config.options.clip_duration = c.sampling.duration;
  return c;
}

}  // namespace

void PipelineConfig::validate() const {
  const auto& s = sampling;
  if (s.k < 1) throw Error(ErrorCode::kConfig, "sampling.k must be >= 1");
  if (s.stride < 1) throw Error(ErrorCode::kConfig, "sampling.stride must be >= 1");
  if (!(s.fps > 0.0) || !(s.duration > 0.0)) {
    throw Error(ErrorCode::kConfig, "sampling.fps and sampling.duration must be positive");
  }
  if (s.parallelism < 1) throw Error(ErrorCode::kConfig, "sampling.parallelism must be >= 1");
  judge.weights.validate();
  if (judge.retries < 0) throw Error(ErrorCode::kConfig, "judge.retries must be >= 0");
  scale.validate();
  if (!(planner.switch_threshold > 0.0) || !(planner.clearance >= 0.0) || !(planner.dt > 0.0) ||
      !(planner.max_yaw_rate > 0.0)) {
    throw Error(ErrorCode::kConfig, "planner thresholds must be positive");
  }
  if (!(execution.dt > 0.0) || !(execution.tracking.bandwidth > 0.0) ||
      execution.settle_time < 0.0) {
    throw Error(ErrorCode::kConfig, "invalid execution settings");
  }
  if (!(grid.resolution > 0.0) || grid.margin < 0.0 || grid.max_cells < 1) {
    throw Error(ErrorCode::kConfig, "invalid grid settings");
  }
  if (mission.max_resamples < 0) {
    throw Error(ErrorCode::kConfig, "mission.max_resamples must be >= 0");
  }
  if (adapters.mock) {
    const auto& m = adapters.mock_config;
    if (m.options.width < 1 || m.options.height < 1 || m.options.scale_override < 0.0) {
      throw Error(ErrorCode::kConfig, "invalid mock frame size or scale override");
    }
    if (!(m.pass_probability >= 0.0 && m.pass_probability <= 1.0)) {
      throw Error(ErrorCode::kConfig, "adapters.mock.pass_probability outside [0, 1]");
    }
    if (m.judge == MockJudgeMode::kScripted && m.judge_script.empty()) {
      throw Error(ErrorCode::kConfig, "scripted mock judge needs adapters.mock.judge_script");
    }
  } else {
    for (const AdapterConfig* a :
         {&adapters.video, &adapters.decoder, &adapters.depth, &adapters.judge}) {
      a->validate();
      if (a->endpoint.empty()) throw Error(ErrorCode::kConfig, "wire adapter without endpoint");
    }
  }
}

PipelineConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  try {
    c = parse_doc(json::parse(json_text), base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.parent_path());
}

std::string config_to_json(const PipelineConfig& c) {
  json script = json::array();
  for (const auto& round : c.adapters.mock_config.judge_script) {
    json r = json::array();
    for (const auto& s : round) r.push_back(to_json_value(s));
    script.push_back(r);
  }
  const auto& m = c.adapters.mock_config;
  json doc{
      {"sampling",
       {{"k", c.sampling.k},
        {"stride", c.sampling.stride},
        {"fps", c.sampling.fps},
        {"duration", c.sampling.duration},
        {"prompt_level", std::string(to_string(c.sampling.prompt_level))},
        {"task_family", c.sampling.task_family},
        {"templates_file", c.sampling.templates_file},
        {"parallelism", c.sampling.parallelism},
        {"seed", c.sampling.seed}}},
      {"judge",
       {{"w_as", c.judge.weights.w_as},
        {"w_sc", c.judge.weights.w_sc},
        {"w_tp", c.judge.weights.w_tp},
        {"normalizer", c.judge.weights.normalizer},
        {"retries", c.judge.retries},
        {"per_candidate", c.judge.per_candidate}}},
      {"scale",
       {{"tau_min", c.scale.tau_min},
        {"tau_max", c.scale.tau_max},
        {"min_valid_pixels", c.scale.min_valid_pixels},
        {"pixel_stride", c.scale.pixel_stride},
        {"consensus", c.scale.consensus == Consensus::kMedian ? "median" : "mean"}}},
      {"planner",
       {{"switch_threshold", c.planner.switch_threshold},
        {"clearance", c.planner.clearance},
        {"dt", c.planner.dt},
        {"max_yaw_rate", c.planner.max_yaw_rate},
        {"corner_angle", c.planner.corner_angle},
        {"v_floor", c.planner.floors.v_floor},
        {"a_floor", c.planner.floors.a_floor},
        {"a_fallback", c.planner.floors.a_fallback}}},
      {"execution",
       {{"dt", c.execution.dt},
        {"settle_time", c.execution.settle_time},
        {"bandwidth", c.execution.tracking.bandwidth},
        {"accel_noise", c.execution.tracking.accel_noise},
        {"seed", c.execution.tracking.seed}}},
      {"grid",
       {{"resolution", c.grid.resolution},
        {"margin", c.grid.margin},
        {"max_cells", c.grid.max_cells}}},
      {"mission",
       {{"max_resamples", c.mission.max_resamples},
        {"allow_override", c.mission.allow_override},
        {"resample_seed_stride", c.mission.resample_seed_stride}}},
      {"adapters",
       {{"mode", c.adapters.mock ? "mock" : "wire"},
        {"mock",
         {{"scene", m.scene},
          {"width", m.options.width},
          {"height", m.options.height},
          {"scale_override", m.options.scale_override},
          {"judge", m.judge == MockJudgeMode::kScripted ? "scripted" : "stochastic"},
          {"pass_probability", m.pass_probability},
          {"judge_seed", m.judge_seed},
          {"judge_script", script},
          {"rewriter", m.rewriter}}},
        {"video", adapter_json(c.adapters.video)},
        {"decoder", adapter_json(c.adapters.decoder)},
        {"depth", adapter_json(c.adapters.depth)},
        {"judge", adapter_json(c.adapters.judge)},
        {"rewriter", adapter_json(c.adapters.rewriter)}}}};
  return doc.dump(2);
}

AdapterSet make_adapters(const PipelineConfig& config,
                         std::shared_ptr<const SyntheticScene> scene) {
  AdapterSet set;
  if (config.adapters.mock) {
    if (!scene) throw Error(ErrorCode::kConfig, "mock adapters need a scene file");
    const auto& m = config.adapters.mock_config;
    MockOptions opts = m.options;
    opts.clip_duration = config.sampling.duration;
    set.video = std::make_shared<MockVideoGen>(scene, opts);
    set.decoder = std::make_shared<MockGeometryDecoder>(scene, opts);
    set.depth = std::make_shared<MockMetricDepth>(scene, opts);
    if (m.judge == MockJudgeMode::kScripted) {
      set.judge = std::make_shared<ScriptedJudge>(m.judge_script);
    } else {
      set.judge = std::make_shared<StochasticJudge>(m.pass_probability, m.judge_seed);
    }
    if (m.rewriter) set.rewriter = std::make_shared<MockPromptRewriter>();
    return set;
  }
  set.video = std::make_shared<HttpVideoGen>(config.adapters.video);
  set.decoder = std::make_shared<HttpGeometryDecoder>(config.adapters.decoder);
  set.depth = std::make_shared<HttpMetricDepth>(config.adapters.depth);
  set.judge = std::make_shared<HttpJudge>(config.adapters.judge);
  if (!config.adapters.rewriter.endpoint.empty()) {
    set.rewriter = std::make_shared<HttpPromptRewriter>(config.adapters.rewriter);
  }
  return set;
}

PromptTemplates load_templates(const SamplingConfig& config) {
  PromptTemplates t = PromptTemplates::builtin();
  if (config.templates_file.empty()) return t;
  const PromptTemplates extra = PromptTemplates::from_json(read_text_file(config.templates_file));
  for (const std::string& family : extra.families()) {
    for (PromptLevel level :
         {PromptLevel::kSimple, PromptLevel::kKinematic, PromptLevel::kDecomposed}) {
      if (const std::string* body = extra.find(family, level)) t.set(family, level, *body);
    }
  }
  return t;
}

}  // namespace vidnav
