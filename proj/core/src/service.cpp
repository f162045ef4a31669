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


#include "vidnav/service.hpp"

#include <algorithm>
#include <sstream>

#include "json_codec.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

// After Eigen; see adapters_wire.cpp.
#include <httplib.h>

namespace vidnav {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kState: return 409;
    case ErrorCode::kArgument:
    case ErrorCode::kInput:
    case ErrorCode::kParse:
    case ErrorCode::kConfig:
    case ErrorCode::kShape:
    case ErrorCode::kDomain: return 400;
    default: return 500;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status, json{{"error", code}, {"message", message}});
}

json mission_body(const Mission& m) { return json::parse(mission_to_json(m)); }

}  // namespace

struct MissionService::Impl {
  MissionRunner& runner;
  PipelineConfig config;
  std::shared_ptr<const SyntheticScene> scene;
  httplib::Server server;
  int port = 0;

  Impl(MissionRunner& r, PipelineConfig c, std::shared_ptr<const SyntheticScene> s)
      : runner(r), config(std::move(c)), scene(std::move(s)) {
    routes();
  }

  // Runs `fn`, translating failures into error responses.
  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), std::string(to_string(e.code())), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "parse", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  }

  bool known(const std::string& id, httplib::Response& res) {
    if (runner.store().exists(id)) return true;
    send_error(res, 404, "not-found", "no mission '" + id + "'");
    return false;
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server.Post("/missions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = json::parse(req.body.empty() ? "{}" : req.body);
        const std::string instruction = body.value("instruction", "");
        Image observation;
        Pose start;
        if (scene) start = mock_start_pose(*scene);
        if (body.contains("observation")) {
          try {
            observation = decode_png(base64_decode(body.at("observation").get<std::string>()));
          } catch (const Error& e) {
            throw Error(ErrorCode::kInput, std::string("unreadable observation: ") + e.what());
          }
        } else if (scene) {
          observation = mock_observation(*scene, config.adapters.mock_config.options);
        } else {
          throw Error(ErrorCode::kInput, "observation is required");
        }
        const Mission m = runner.store().create(instruction, observation, config, start);
        send_json(res, 201, mission_body(m));
      });
    });

    server.Get("/missions", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        std::vector<Mission> missions;
        for (const std::string& id : runner.store().list()) {
          missions.push_back(runner.store().load(id));
        }
        std::stable_sort(missions.begin(), missions.end(), [](const Mission& a, const Mission& b) {
          return a.created_ms > b.created_ms;
        });
        json list = json::array();
        for (const Mission& m : missions) {
          list.push_back({{"id", m.id},
                          {"state", std::string(to_string(m.state))},
                          {"instruction", m.instruction},
                          {"resample_count", m.resample_count},
                          {"created_ms", m.created_ms}});
        }
        send_json(res, 200, json{{"missions", list}});
      });
    });

    server.Get(R"(/missions/([\w-]+))", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (!known(id, res)) return;
        send_json(res, 200, mission_body(runner.store().load(id)));
      });
    });

    server.Get(R"(/missions/([\w-]+)/candidates)", [this](const httplib::Request& req,
                                                          httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (!known(id, res)) return;
        const Mission m = runner.store().load(id);
        const int stride = runner.store().config(id).sampling.stride;
        const json full = mission_body(m);
        json list = json::array();
        for (size_t i = 0; i < m.candidates.size(); ++i) {
          json c = full.at("candidates").at(i);
          c["frames"] = m.candidates[i].frame_count > 0
                            ? json(downsample_indices(m.candidates[i].frame_count, stride))
                            : json::array();
          c["selected"] = m.selected && *m.selected == m.candidates[i].id;
          list.push_back(std::move(c));
        }
        send_json(res, 200,
                  json{{"mission", id},
                       {"state", std::string(to_string(m.state))},
                       {"round", m.resample_count},
                       {"candidates", list}});
      });
    });

    server.Post(R"(/missions/([\w-]+)/advance)", [this](const httplib::Request& req,
                                                        httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (!known(id, res)) return;
        send_json(res, 200, mission_body(runner.advance(id)));
      });
    });

    server.Post(R"(/missions/([\w-]+)/decision)", [this](const httplib::Request& req,
                                                         httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (!known(id, res)) return;
        const json body = json::parse(req.body.empty() ? "{}" : req.body);
        SupervisorDecision d;
        d.mission_id = id;
        d.action = parse_decision_action(body.value("action", ""));
        d.candidate = body.value("candidate", 0);
        send_json(res, 200, mission_body(runner.decide(d)));
      });
    });

    server.Get(R"(/missions/([\w-]+)/candidates/(\d+)/frames/(\d+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   const std::string id = req.matches[1];
                   if (!known(id, res)) return;
                   const Mission m = runner.store().load(id);
                   const int cid = std::stoi(req.matches[2]);
                   const int n = std::stoi(req.matches[3]);
                   const fs::path file = runner.store().dir(id) /
                                         ("round_" + std::to_string(m.resample_count)) /
                                         ("candidate_" + std::to_string(cid)) /
                                         frame_filename(n);
                   if (!fs::exists(file)) {
                     send_error(res, 404, "not-found", "no such frame");
                     return;
                   }
                   const auto bytes = read_file_bytes(file);
                   res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
                 });
               });

    server.Get(R"(/missions/([\w-]+)/trajectory)", [this](const httplib::Request& req,
                                                          httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (!known(id, res)) return;
        const fs::path dir = runner.store().dir(id);
        if (!fs::exists(dir / "geometry" / "waypoints.txt")) {
          send_error(res, 404, "not-found", "no waypoints yet");
          return;
        }
        json wps = json::array();
        for (const Waypoint& w : load_mission_waypoints(runner.store(), id)) {
          wps.push_back(to_json_value(w));
        }
        json body{{"mission", id}, {"waypoints", wps}, {"samples", json::array()},
                  {"duration", nullptr}};
        if (fs::exists(dir / "plan" / "trajectory.txt")) {
          const Trajectory t = load_mission_trajectory(runner.store(), id);
          for (const TrajectorySample& s : t.samples) {
            body["samples"].push_back(
                {{"t", s.t},
                 {"position", {s.position.x(), s.position.y(), s.position.z()}},
                 {"velocity", {s.velocity.x(), s.velocity.y(), s.velocity.z()}},
                 {"yaw", s.yaw}});
          }
          body["duration"] = t.duration();
        }
        send_json(res, 200, body);
      });
    });
  }
};

MissionService::MissionService(MissionRunner& runner, PipelineConfig config,
                               std::shared_ptr<const SyntheticScene> scene)
    : impl_(std::make_unique<Impl>(runner, std::move(config), std::move(scene))) {}

MissionService::~MissionService() { stop(); }

int MissionService::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    impl_->port = port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return impl_->port;
}

void MissionService::listen() { impl_->server.listen_after_bind(); }

void MissionService::stop() {
  if (impl_) impl_->server.stop();
}

bool MissionService::running() const { return impl_->server.is_running(); }

}  // namespace vidnav
