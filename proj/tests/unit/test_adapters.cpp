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

#include <atomic>
#include <cstdlib>
#include <thread>

#include "../support/fixtures.hpp"
#include "vidnav/adapters.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"
#include "vidnav/pfm.hpp"

// After Eigen; see adapters_wire.cpp.
#include <httplib.h>
#include <json.hpp>

namespace vidnav {
namespace {

using nlohmann::json;

// Straight 4 m flight along +x at the given decoder scale.
std::shared_ptr<const SyntheticScene> straight_scene(double gt_scale) {
  auto s = std::make_shared<SyntheticScene>();
  s->intrinsics = {40, 40, 16, 12, 32, 24};
  s->gt_scale = gt_scale;
  s->gt_trajectory = {{0, 0, 0, 1.5, 0}, {5, 4, 0, 1.5, 0}};
  s->obstacles.push_back({Vec3(8, -5, 0), Vec3(9, 5, 5), "wall"});
  return s;
}

Frame frame_at(double t, int w = 32, int h = 24) {
  Frame f;
  f.image = Image(w, h);
  f.t = t;
  return f;
}

TEST(Backoff, ExponentialWithJitterAndCap) {
  AdapterConfig c;
  EXPECT_DOUBLE_EQ(c.backoff_delay(1, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(c.backoff_delay(3, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(c.backoff_delay(3, 0.0), 3.2);
  EXPECT_DOUBLE_EQ(c.backoff_delay(20, 0.99), 30.0);
  c.parallelism = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(MockVideo, DeterministicDigests) {
  GenerationRequest r;
  r.instruction = "fly";
  r.seed = 7;
  r.fps = 4;
  r.duration = 2;
  MockVideoGen a(fixture::golden_scene(), fixture::tiny());
  MockVideoGen b(fixture::golden_scene(), fixture::tiny());
  const auto va = a.generate(r), vb = b.generate(r);
  ASSERT_EQ(va.frames.size(), 9u);
  for (size_t i = 0; i < va.frames.size(); ++i) EXPECT_EQ(digest(va.frames[i]), digest(vb.frames[i]));
  r.seed = 8;
  EXPECT_NE(digest(a.generate(r).frames[3]), digest(va.frames[3]));
}

TEST(MockDecoder, DisplacementInDecoderUnits) {
  MockGeometryDecoder dec(straight_scene(2.0), fixture::tiny());
  const auto out = dec.decode({frame_at(0), frame_at(5)});
  ASSERT_EQ(out.poses.size(), 2u);
  EXPECT_NEAR(out.poses[1].position.norm(), 2.0, 1e-9);
  EXPECT_EQ(out.pointmaps[0].width, 32);
  try {
    dec.decode({frame_at(0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArgument);
  }
}

TEST(MockDecoder, ScaleOverride) {
  auto opts = fixture::tiny();
  opts.scale_override = 1.0 / 0.46;
  MockGeometryDecoder dec(straight_scene(2.0), opts);
  const auto out = dec.decode({frame_at(0), frame_at(5)});
  EXPECT_NEAR(out.poses[1].position.norm(), 4.0 * 0.46, 1e-9);
}

TEST(MockDepth, ExactWithoutNoiseAndSeededWithNoise) {
  auto scene = straight_scene(2.0);
  MockMetricDepth clean(scene, fixture::tiny());
  const auto d = clean.estimate(frame_at(0));
  const auto gt = render_ground_truth(*scene, scene->pose_at(0), 32, 24);
  EXPECT_EQ(d.depth, gt.depth.depth);

  auto noisy_scene = std::make_shared<SyntheticScene>(*scene);
  noisy_scene->noise.depth_sigma = 0.05;
  noisy_scene->noise.seed = 3;
  MockMetricDepth noisy(noisy_scene, fixture::tiny());
  const auto n1 = noisy.estimate(frame_at(0)), n2 = noisy.estimate(frame_at(0));
  EXPECT_EQ(encode_pfm(n1), encode_pfm(n2));
  EXPECT_NE(n1.depth, gt.depth.depth);

  Frame torn = frame_at(0);
  torn.image.rgb.resize(5);
  EXPECT_THROW(clean.estimate(torn), Error);
  try {
    clean.estimate(Frame{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArgument);
  }
}

TEST(MockJudge, ScriptedLineIsExact) {
  ScriptedJudge judge({{{1, true, 4.5, 4.8, 4.0, 4.2, "smooth orbit"}}});
  const auto text = judge.rank("p", {FrameSequence{frame_at(0)}});
  EXPECT_NE(text.find("Video 1: <score> 4.5 </score> | Status: Pass | TP: 4.8 | AS: 4.0 | "
                      "SC: 4.2 | Reason: smooth orbit"),
            std::string::npos);
  EXPECT_EQ(judge.calls(), 1);
}

TEST(MockJudge, StochasticBoundaries) {
  std::vector<FrameSequence> three;
  for (int i = 0; i < 3; ++i) {
    Frame f = frame_at(0, 2, 2);
    f.image.rgb[0] = static_cast<std::uint8_t>(i);
    three.push_back({f});
  }
  StochasticJudge never(0.0, 1);
  const auto none = parse_judge_output(never.rank("p", three), 3);
  for (const auto& v : none.verdicts) EXPECT_FALSE(v.pass);
  EXPECT_TRUE(select_best(none.verdicts).escalated());
  StochasticJudge always(1.0, 1);
  const auto all = parse_judge_output(always.rank("p", three), 3);
  for (const auto& v : all.verdicts) EXPECT_TRUE(v.pass);
  // Same content, same verdict, regardless of batch position.
  StochasticJudge half(0.5, 9);
  const auto a = parse_judge_output(half.rank("p", three), 3);
  const auto b = parse_judge_output(half.rank("p", {three[2]}), 1);
  EXPECT_EQ(a.verdicts[2].pass, b.verdicts[0].pass);
}

// --- Wire ------------------------------------------------------------------

class WireServer {
 public:
  WireServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~WireServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

AdapterConfig wire_config(const std::string& url) {
  AdapterConfig c;
  c.endpoint = url;
  c.timeout = 5;
  c.max_retries = 2;
  c.backoff_base = 0.01;
  c.backoff_cap = 0.05;
  return c;
}

TEST(Wire, MissingAuthEnvFailsBeforeIo) {
  WireServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/rank", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.set_content(R"({"text": "x"})", "application/json");
  });
  ::unsetenv("VIDNAV_TEST_NO_SUCH_TOKEN");
  auto c = wire_config(srv.url());
  c.auth_token_env = "VIDNAV_TEST_NO_SUCH_TOKEN";
  HttpJudge judge(c);
  try {
    judge.rank("p", {FrameSequence{frame_at(0, 2, 2)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  EXPECT_EQ(hits.load(), 0);
}

TEST(Wire, BearerTokenFromEnvironment) {
  WireServer srv;
  std::string seen;
  srv.server().Post("/rewrite", [&](const httplib::Request& req, httplib::Response& res) {
    seen = req.get_header_value("Authorization");
    const auto body = json::parse(req.body);
    res.set_content(json{{"text", "re: " + body.at("instruction").get<std::string>()}}.dump(),
                    "application/json");
  });
  ::setenv("VIDNAV_TEST_TOKEN", "s3cret", 1);
  auto c = wire_config(srv.url());
  c.auth_token_env = "VIDNAV_TEST_TOKEN";
  HttpPromptRewriter rw(c);
  EXPECT_EQ(rw.rewrite("p", "go"), "re: go");
  EXPECT_EQ(seen, "Bearer s3cret");
}

TEST(Wire, RetriesThenTransportErrorWithAttempts) {
  WireServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/rank", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  HttpJudge judge(wire_config(srv.url()));
  try {
    judge.rank("p", {FrameSequence{frame_at(0, 2, 2)}});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_EQ(e.status(), 503);
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  EXPECT_EQ(hits.load(), 3);
}

TEST(Wire, TimeoutIsRetried) {
  WireServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/rank", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    res.set_content(R"({"text": "late"})", "application/json");
  });
  auto c = wire_config(srv.url());
  c.timeout = 0.1;
  c.max_retries = 1;
  HttpJudge judge(c);
  try {
    judge.rank("p", {FrameSequence{frame_at(0, 2, 2)}});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 2);
    EXPECT_EQ(e.status(), 0);
  }
}

TEST(Wire, AuthRejectedAndMalformedPayload) {
  WireServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/rank", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  srv.server().Post("/rewrite", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{not json", "application/json");
  });
  HttpJudge judge(wire_config(srv.url()));
  try {
    judge.rank("p", {FrameSequence{frame_at(0, 2, 2)}});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 1);
    EXPECT_EQ(e.status(), 401);
  }
  EXPECT_EQ(hits.load(), 1);
  HttpPromptRewriter rw(wire_config(srv.url()));
  EXPECT_THROW(rw.rewrite("p", "i"), TransportError);
}

TEST(Wire, RejectsHttpsAndBadUrls) {
  for (const char* url : {"https://example.com", "ftp://x", "http://"}) {
    try {
      HttpJudge j(wire_config(url));
      FAIL() << url;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig);
    }
  }
}

TEST(Wire, VideoDecodeDepthRoundTrip) {
  WireServer srv;
  const Image tile(4, 3);
  srv.server().Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    EXPECT_EQ(body.at("seed").get<int>(), 12);
    const auto png = base64_encode(encode_png(tile));
    res.set_content(json{{"frames", {png, png, png}}}.dump(), "application/json");
  });
  srv.server().Post("/decode", [&](const httplib::Request& req, httplib::Response& res) {
    const auto frames = json::parse(req.body).at("frames");
    json poses = json::array(), maps = json::array();
    for (size_t i = 0; i < frames.size(); ++i) {
      poses.push_back({1, 0, 0, 0, 1, 0, 0, 0, 1, double(i), 0, 0});
      maps.push_back(base64_encode(encode_pfm(PointMap(4, 3))));
    }
    res.set_content(json{{"poses", poses}, {"pointmaps", maps}}.dump(), "application/json");
  });
  srv.server().Post("/depth", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"depth", base64_encode(encode_pfm(DepthMap(4, 3, 2.5f)))}}.dump(),
                    "application/json");
  });

  GenerationRequest r;
  r.instruction = "go";
  r.seed = 12;
  HttpVideoGen gen(wire_config(srv.url()));
  const auto video = gen.generate(r);
  ASSERT_EQ(video.frames.size(), 3u);
  EXPECT_EQ(video.frames[0].rgb, tile.rgb);

  HttpGeometryDecoder dec(wire_config(srv.url()));
  Frame f;
  f.image = tile;
  const auto geo = dec.decode({f, f});
  ASSERT_EQ(geo.poses.size(), 2u);
  EXPECT_DOUBLE_EQ(geo.poses[1].position.x(), 1.0);
  EXPECT_THROW(dec.decode({f}), Error);

  HttpMetricDepth depth(wire_config(srv.url()));
  EXPECT_FLOAT_EQ(depth.estimate(f).at(1, 1), 2.5f);
  try {
    depth.estimate(frame_at(0, 8, 8));  // server answers 4x3
    FAIL();
  } catch (const TransportError&) {
  }
}

}  // namespace
}  // namespace vidnav
