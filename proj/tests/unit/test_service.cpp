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

#include <future>
#include <thread>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"
#include "vidnav/mission.hpp"
#include "vidnav/service.hpp"

// After Eigen; see adapters_wire.cpp.
#include <httplib.h>
#include <json.hpp>

namespace vidnav {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void start(bool all_fail) {
    config_ = fixture::mock_config();
    config_.mission.max_resamples = 2;
    auto set = make_adapters(config_, fixture::golden_scene());
    if (all_fail) {
      std::vector<JudgeScores> round;
      for (int i = 1; i <= 3; ++i) round.push_back({i, false, 1.5, 2.0, 3.0, 4.0, "off course"});
      set.judge = std::make_shared<ScriptedJudge>(std::vector<std::vector<JudgeScores>>{round});
    }
    root_ = oracle::temp_dir("service");
    store_ = std::make_unique<MissionStore>(root_);
    runner_ = std::make_unique<MissionRunner>(*store_, set, fixture::golden_scene());
    service_ = std::make_unique<MissionService>(*runner_, config_, fixture::golden_scene());
    port_ = service_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { service_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 200 && !service_->running(); ++i)
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  void TearDown() override {
    if (service_) service_->stop();
    if (thread_.joinable()) thread_.join();
    std::filesystem::remove_all(root_);
  }

  json post(const std::string& path, const json& body, int expect) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << ": " << res->body;
    return json::parse(res->body);
  }
  json get(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << ": " << res->body;
    return json::parse(res->body);
  }
  std::string advance_until_waiting(const std::string& id) {
    std::string state;
    for (int i = 0; i < 10; ++i) {
      state = post("/missions/" + id + "/advance", json::object(), 200).at("state");
      if (state == "awaiting-supervisor" || state == "done" || state == "aborted") break;
    }
    return state;
  }

  PipelineConfig config_;
  std::filesystem::path root_;
  std::unique_ptr<MissionStore> store_;
  std::unique_ptr<MissionRunner> runner_;
  std::unique_ptr<MissionService> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServiceTest, CreateListGet) {
  start(false);
  EXPECT_TRUE(get("/missions").at("missions").empty());
  const auto a = post("/missions", {{"instruction", "fly to the rock"}}, 201);
  EXPECT_EQ(a.at("state"), "created");
  Image obs(8, 6);
  const auto b = post("/missions",
                      {{"instruction", "hover"}, {"observation", base64_encode(encode_png(obs))}},
                      201);
  EXPECT_NE(a.at("id"), b.at("id"));
  EXPECT_EQ(get("/missions").at("missions").size(), 2u);
  EXPECT_EQ(get("/missions/" + a.at("id").get<std::string>()).at("instruction"), "fly to the rock");

  EXPECT_EQ(post("/missions", {{"instruction", ""}}, 400).at("error"), "input");
  post("/missions", {{"instruction", "x"}, {"observation", "bm90IGEgcG5n"}}, 400);
  get("/missions/mdeadbeef0000", 404);
}

TEST_F(ServiceTest, GoldenRunOverHttp) {
  start(false);
  const std::string id = post("/missions", {{"instruction", "fly past the pillar"}}, 201).at("id");
  get("/missions/" + id + "/trajectory", 404);
  EXPECT_EQ(advance_until_waiting(id), "done");
  const auto traj = get("/missions/" + id + "/trajectory");
  EXPECT_EQ(traj.at("waypoints").size(), 11u);
  EXPECT_FALSE(traj.at("samples").empty());
  EXPECT_GT(traj.at("duration").get<double>(), 0.0);
  const auto cands = get("/missions/" + id + "/candidates");
  int selected = 0;
  for (const auto& c : cands.at("candidates")) selected += c.at("selected").get<bool>();
  EXPECT_EQ(selected, 1);
  auto png = client_->Get("/missions/" + id + "/candidates/1/frames/0");
  ASSERT_TRUE(png);
  EXPECT_EQ(png->status, 200);
  EXPECT_EQ(png->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(post("/missions/" + id + "/advance", json::object(), 409).at("error"), "state");
}

TEST_F(ServiceTest, EscalationResampleAndDuplicateDecision) {
  start(true);
  const std::string id = post("/missions", {{"instruction", "circle the tree"}}, 201).at("id");
  ASSERT_EQ(advance_until_waiting(id), "awaiting-supervisor");

  // The console renders candidates with the scores the service reports.
  const auto cands = get("/missions/" + id + "/candidates");
  ASSERT_EQ(cands.at("candidates").size(), 3u);
  for (const auto& c : cands.at("candidates")) {
    EXPECT_EQ(c.at("status"), "fail");
    EXPECT_DOUBLE_EQ(c.at("verdict").at("tp").get<double>(), 2.0);
    EXPECT_NEAR(c.at("reward").get<double>(), (1.4 * 2 + 0.8 * 3 + 0.8 * 4) / 3, 1e-9);
    EXPECT_FALSE(c.at("frames").empty());
  }

  // Two decisions race; the per-mission lock lets exactly one through.
  auto send = [&] {
    httplib::Client c("127.0.0.1", port_);
    auto res = c.Post("/missions/" + id + "/decision", R"({"action": "resample"})",
                      "application/json");
    return res ? res->status : -1;
  };
  auto f1 = std::async(std::launch::async, send);
  auto f2 = std::async(std::launch::async, send);
  const int s1 = f1.get(), s2 = f2.get();
  EXPECT_EQ(std::min(s1, s2), 200);
  EXPECT_EQ(std::max(s1, s2), 409);

  const auto m = get("/missions/" + id);
  EXPECT_EQ(m.at("state"), "generating");
  EXPECT_EQ(m.at("resample_count"), 1);
  int recorded = 0;
  for (const auto& e : m.at("history"))
    recorded += e.at("from") == "awaiting-supervisor" && e.at("to") == "generating";
  EXPECT_EQ(recorded, 1);

  // And once more, sequentially.
  EXPECT_EQ(post("/missions/" + id + "/decision", {{"action", "resample"}}, 409).at("error"),
            "state");
  post("/missions/" + id + "/decision", {{"action", "dance"}}, 400);
  ASSERT_EQ(advance_until_waiting(id), "awaiting-supervisor");
  EXPECT_EQ(post("/missions/" + id + "/decision", {{"action", "terminate"}}, 200).at("state"),
            "aborted");
}

TEST_F(ServiceTest, CorsPreflight) {
  start(false);
  auto res = client_->Options("/missions");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

}  // namespace
}  // namespace vidnav
