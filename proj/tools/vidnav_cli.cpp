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


// vidnav: run missions, serve the mission API, score benchmark files.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include "vidnav/bench_suite.hpp"
#include "vidnav/config.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"
#include "vidnav/mission.hpp"
#include "vidnav/service.hpp"

#include <CLI11.hpp>

namespace {

using namespace vidnav;

struct Context {
  std::string config_path;
  std::string scene_path;
  std::string store_dir = "missions";
};

PipelineConfig load_pipeline(const Context& ctx) {
  PipelineConfig config = ctx.config_path.empty() ? PipelineConfig{} : load_config(ctx.config_path);
  if (!ctx.scene_path.empty()) {
    config.adapters.mock = true;
    config.adapters.mock_config.scene = ctx.scene_path;
  }
  config.validate();
  return config;
}

std::shared_ptr<const SyntheticScene> load_scene_for(const PipelineConfig& config) {
  const std::string& path = config.adapters.mock_config.scene;
  if (path.empty()) return nullptr;
  auto scene = std::make_shared<SyntheticScene>(load_scene(path));
  scene->validate();
  return scene;
}

void print_mission(const Mission& m) {
  std::cout << "mission " << m.id << ": " << to_string(m.state);
  if (!m.cause.empty()) std::cout << " (" << m.cause << ")";
  std::cout << '\n';
  for (const CandidateSummary& c : m.candidates) {
    std::cout << "  candidate " << c.id << " seed " << c.seed << ": " << to_string(c.status);
    if (c.reward) std::cout << " R=" << *c.reward;
    if (c.verdict && c.verdict->flagged()) std::cout << " [flagged]";
    std::cout << '\n';
  }
  if (m.selected) std::cout << "  selected: candidate " << *m.selected << '\n';
  if (m.scale) std::cout << "  scale: " << m.scale->scale << '\n';
  if (m.execution) {
    std::cout << "  execution: " << (m.execution->completed ? "completed" : "incomplete")
              << ", max tracking error " << m.execution->max_tracking_error << " m\n";
  }
}

int cmd_run(const Context& ctx, const std::string& image, const std::string& instruction,
            int auto_resample) {
  const PipelineConfig config = load_pipeline(ctx);
  const auto scene = load_scene_for(config);
  MissionStore store(ctx.store_dir);
  MissionRunner runner(store, make_adapters(config, scene), scene);

  Image observation;
  Pose start;
  if (scene) start = mock_start_pose(*scene);
  if (!image.empty()) {
    observation = load_observation(image);
  } else if (scene) {
    observation = mock_observation(*scene, config.adapters.mock_config.options);
  } else {
    throw Error(ErrorCode::kInput, "--image is required without a mock scene");
  }
  Mission m = store.create(instruction, observation, config, start);
  std::cerr << "created " << m.id << " in " << store.dir(m.id).string() << '\n';
  for (;;) {
    m = runner.run(m.id);
    if (m.state != MissionState::kAwaitingSupervisor || auto_resample-- <= 0) break;
    std::cerr << "no valid candidate; resampling\n";
    m = runner.decide({m.id, DecisionAction::kResample, 0});
  }
  print_mission(m);
  switch (m.state) {
    case MissionState::kDone: return 0;
    case MissionState::kAwaitingSupervisor: return 3;
    default: return 2;
  }
}

int cmd_bench(const std::string& suite_arg, const std::string& scores_path,
              const std::string& out_dir, int trials) {
  const auto suite = suite_arg.empty() || suite_arg == "builtin"
                         ? bench::load_suite()
                         : bench::load_suite_file(suite_arg);
  const std::string csv = read_text_file(scores_path);
  switch (bench::detect_score_file(csv)) {
    case bench::ScoreFileKind::kTrials: {
      const auto scores = bench::parse_trial_scores(csv);
      const auto agg = bench::aggregate(scores, suite, trials);
      for (const auto& w : agg.warnings) std::cerr << "warning: " << w << '\n';
      bench::emit_report(agg, out_dir);
      std::cout << bench::render_table(agg);
      break;
    }
    case bench::ScoreFileKind::kCategories: {
      const auto agg = bench::aggregate_categories(bench::parse_category_scores(csv));
      for (const auto& w : agg.warnings) std::cerr << "warning: " << w << '\n';
      bench::emit_report(agg, out_dir);
      std::cout << bench::render_table(agg);
      break;
    }
    case bench::ScoreFileKind::kSummary: {
      const auto rows = bench::parse_summary_rows(csv);
      bench::emit_summary_report(rows, "Strategy", out_dir);
      std::cout << bench::render_summary(rows);
      break;
    }
  }
  return 0;
}

MissionService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const Context& ctx, const std::string& host, int port) {
  const PipelineConfig config = load_pipeline(ctx);
  const auto scene = load_scene_for(config);
  MissionStore store(ctx.store_dir);
  MissionRunner runner(store, make_adapters(config, scene), scene);
  MissionService service(runner, config, scene);
  const int bound = service.bind(host, port);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on http://" << host << ":" << bound << '\n';
  service.listen();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video-guided drone navigation pipeline"};
  app.require_subcommand(1);
  Context ctx;
  auto add_common = [&ctx](CLI::App* sub) {
    sub->add_option("--config", ctx.config_path, "Pipeline config (JSON)");
    sub->add_option("--mock-scene", ctx.scene_path, "Scene file; selects mock adapters");
    sub->add_option("--store", ctx.store_dir, "Mission store directory");
  };

  std::string image, instruction;
  int auto_resample = 0;
  auto* run = app.add_subcommand("run", "Create a mission and run it to completion");
  add_common(run);
  run->add_option("--image", image, "Observation PNG");
  run->add_option("--instruction", instruction, "Navigation instruction")->required();
  run->add_option("--auto-resample", auto_resample,
                  "Resample automatically this many times on escalation");

  std::string mission_id;
  auto* advance = app.add_subcommand("advance", "Run one stage of a mission");
  add_common(advance);
  advance->add_option("--mission", mission_id)->required();

  std::string action;
  int candidate = 0;
  auto* decide = app.add_subcommand("decide", "Answer a mission awaiting its supervisor");
  add_common(decide);
  decide->add_option("--mission", mission_id)->required();
  decide->add_option("--action", action, "resample | terminate | approve-override")->required();
  decide->add_option("--candidate", candidate, "Candidate id for approve-override");

  auto* inspect = app.add_subcommand("inspect", "Print a mission record");
  inspect->add_option("--store", ctx.store_dir, "Mission store directory");
  inspect->add_option("--mission", mission_id, "Mission id (omit to list)");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the mission HTTP API");
  add_common(serve);
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  std::string suite = "builtin", scores, out = "bench_report";
  int trials = 5;
  auto* bench_cmd = app.add_subcommand("bench", "Aggregate benchmark scores into a report");
  bench_cmd->add_option("--suite", suite, "'builtin' or a suite CSV");
  bench_cmd->add_option("--scores", scores, "Score CSV")->required();
  bench_cmd->add_option("--out", out, "Report directory");
  bench_cmd->add_option("--trials", trials, "Trials expected per task");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(ctx, image, instruction, auto_resample);
    if (*bench_cmd) return cmd_bench(suite, scores, out, trials);
    if (*serve) return cmd_serve(ctx, host, port);
    if (*inspect) {
      MissionStore store(ctx.store_dir);
      if (mission_id.empty()) {
        for (const auto& id : store.list()) {
          const Mission m = store.load(id);
          std::cout << id << "  " << to_string(m.state) << "  " << m.instruction << '\n';
        }
      } else {
        std::cout << mission_to_json(store.load(mission_id)) << '\n';
      }
      return 0;
    }
    const PipelineConfig config = load_pipeline(ctx);
    const auto scene = load_scene_for(config);
    MissionStore store(ctx.store_dir);
    MissionRunner runner(store, make_adapters(config, scene), scene);
    Mission m = *advance ? runner.advance(mission_id)
                         : runner.decide({mission_id, parse_decision_action(action), candidate});
    print_mission(m);
    return 0;
  } catch (const vidnav::Error& e) {
    std::cerr << "vidnav: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vidnav: " << e.what() << '\n';
    return 1;
  }
}
