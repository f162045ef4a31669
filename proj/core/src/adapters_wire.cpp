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
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

#include "vidnav/adapters.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"
#include "vidnav/pfm.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro
// that collides with Eigen parameter names.
#include <httplib.h>
#include <json.hpp>

namespace vidnav {

using nlohmann::json;

constexpr int kMaxParallelism = 256;

void AdapterConfig::validate() const {
  if (!(timeout > 0.0)) throw Error(ErrorCode::kConfig, "adapter timeout must be positive");
  if (max_retries < 0) throw Error(ErrorCode::kConfig, "adapter max_retries must be >= 0");
  if (parallelism < 1 || parallelism > kMaxParallelism) {
    throw Error(ErrorCode::kConfig, "adapter parallelism must be in [1, 256]");
  }
  if (backoff_base < 0.0 || backoff_factor < 1.0 || backoff_jitter < 0.0 ||
      backoff_jitter >= 1.0 || backoff_cap < 0.0) {
    throw Error(ErrorCode::kConfig, "invalid adapter backoff settings");
  }
}

double AdapterConfig::backoff_delay(int attempt, double u) const {
  const double raw = backoff_base * std::pow(backoff_factor, std::max(0, attempt - 1));
  const double jittered = std::min(raw, backoff_cap) * (1.0 + backoff_jitter * (2.0 * u - 1.0));
  return std::clamp(jittered, 0.0, backoff_cap);
}

class HttpTransport {
 public:
  explicit HttpTransport(AdapterConfig config)
      : config_(std::move(config)), admission_(config_.parallelism), rng_(std::random_device{}()) {
    config_.validate();
    const std::string& url = config_.endpoint;
    if (url.rfind("https://", 0) == 0) {
      throw Error(ErrorCode::kConfig, "https endpoints are not supported; use a local TLS proxy");
    }
    if (url.rfind("http://", 0) != 0) {
      throw Error(ErrorCode::kConfig, "adapter endpoint must be an http:// URL: '" + url + "'");
    }
    const size_t slash = url.find('/', 7);
    base_ = url.substr(0, slash);
    if (base_.size() <= 7) throw Error(ErrorCode::kConfig, "adapter endpoint has no host");
    if (slash != std::string::npos) prefix_ = url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  json post(const std::string& path, const json& body) {
    // Secrets come only from the environment, and are checked before any I/O.
    std::string token;
    if (!config_.auth_token_env.empty()) {
      const char* value = std::getenv(config_.auth_token_env.c_str());
      if (!value || !*value) {
        throw Error(ErrorCode::kConfig,
                    "environment variable " + config_.auth_token_env + " is not set");
      }
      token = value;
    }
    admission_.acquire();
    struct Release {
      std::counting_semaphore<kMaxParallelism>& s;
      ~Release() { s.release(); }
    } release{admission_};

    const std::string payload = body.dump();
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    const auto secs = static_cast<time_t>(config_.timeout);
    const auto usecs = static_cast<time_t>((config_.timeout - secs) * 1e6);

    std::string last_error;
    int last_status = 0;
    const int attempts = config_.max_retries + 1;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      httplib::Client client(base_);
      client.set_connection_timeout(secs, usecs);
      client.set_read_timeout(secs, usecs);
      client.set_write_timeout(secs, usecs);
      auto res = client.Post(prefix_ + path, headers, payload, "application/json");
      bool retry = true;
      if (!res) {
        last_error = httplib::to_string(res.error());
        last_status = 0;
      } else {
        last_status = res->status;
        if (res->status >= 200 && res->status < 300) {
          try {
            return json::parse(res->body);
          } catch (const json::exception&) {
            throw TransportError(path + ": malformed response payload", attempt, res->status);
          }
        }
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status == 401 || res->status == 403) {
          throw TransportError(path + ": authentication rejected (" + last_error + ")",
                               attempt, res->status);
        }
        retry = res->status == 408 || res->status == 429 || res->status >= 500;
      }
      if (!retry) {
        throw TransportError(path + ": request rejected (" + last_error + ")", attempt,
                             last_status);
      }
      if (attempt < attempts) {
        double u;
        {
          std::lock_guard lock(rng_mutex_);
          u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        }
        std::this_thread::sleep_for(
            std::chrono::duration<double>(config_.backoff_delay(attempt, u)));
      }
    }
    throw TransportError(path + ": giving up after " + std::to_string(attempts) +
                             " attempts (" + last_error + ")",
                         attempts, last_status);
  }

 private:
  AdapterConfig config_;
  std::string base_;
  std::string prefix_;
  std::counting_semaphore<kMaxParallelism> admission_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
};

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw TransportError("malformed response: " + what, 1, 200);
}

std::string png_b64(const Image& image) { return base64_encode(encode_png(image)); }

template <typename T>
T field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) malformed(std::string("missing '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    malformed(std::string("bad '") + key + "'");
  }
}

Image png_from_b64(const std::string& text) {
  try {
    return decode_png(base64_decode(text));
  } catch (const Error& e) {
    malformed(std::string("frame: ") + e.what());
  }
}

}  // namespace

HttpVideoGen::HttpVideoGen(AdapterConfig config)
    : transport_(std::make_unique<HttpTransport>(std::move(config))) {}
HttpVideoGen::~HttpVideoGen() = default;

CandidateVideo HttpVideoGen::generate(const GenerationRequest& request) {
  request.validate();
  json body{{"prompt", request.prompt.empty() ? request.instruction : request.prompt},
            {"instruction", request.instruction},
            {"seed", request.seed},
            {"duration", request.duration},
            {"fps", request.fps}};
  if (request.image) body["image"] = png_b64(*request.image);
  const json res = transport_->post("/generate", body);
  CandidateVideo video;
  video.seed = request.seed;
  video.fps = res.is_object() ? res.value("fps", request.fps) : request.fps;
  for (const std::string& f : field<std::vector<std::string>>(res, "frames")) {
    video.frames.push_back(png_from_b64(f));
  }
  if (video.frames.empty()) malformed("no frames");
  return video;
}

HttpGeometryDecoder::HttpGeometryDecoder(AdapterConfig config)
    : transport_(std::make_unique<HttpTransport>(std::move(config))) {}
HttpGeometryDecoder::~HttpGeometryDecoder() = default;

GeometryDecodeResult HttpGeometryDecoder::decode(const FrameSequence& frames) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::kArgument, "geometry decoding needs at least 2 frames");
  }
  json list = json::array();
  for (const Frame& f : frames) {
    list.push_back({{"index", f.index}, {"t", f.t}, {"image", png_b64(f.image)}});
  }
  const json res = transport_->post("/decode", json{{"frames", list}});
  const auto poses = field<std::vector<std::vector<double>>>(res, "poses");
  const auto maps = field<std::vector<std::string>>(res, "pointmaps");
  if (poses.size() != frames.size() || maps.size() != frames.size()) {
    malformed("decoder returned " + std::to_string(poses.size()) + " poses and " +
              std::to_string(maps.size()) + " pointmaps for " +
              std::to_string(frames.size()) + " frames");
  }
  GeometryDecodeResult out;
  for (const auto& p : poses) {
    if (p.size() != 12) malformed("pose needs 12 numbers");
    Pose pose;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) pose.rotation(r, c) = p[static_cast<size_t>(r * 3 + c)];
    }
    pose.position = Vec3(p[9], p[10], p[11]);
    if (!pose.is_valid(1e-3)) malformed("pose rotation is not orthonormal");
    out.poses.push_back(pose.renormalized());
  }
  for (const std::string& m : maps) {
    try {
      out.pointmaps.push_back(decode_pointmap_pfm(base64_decode(m)));
    } catch (const Error& e) {
      malformed(std::string("pointmap: ") + e.what());
    }
  }
  return out;
}

HttpMetricDepth::HttpMetricDepth(AdapterConfig config)
    : transport_(std::make_unique<HttpTransport>(std::move(config))) {}
HttpMetricDepth::~HttpMetricDepth() = default;

DepthMap HttpMetricDepth::estimate(const Frame& frame) {
  if (frame.image.empty()) throw Error(ErrorCode::kArgument, "invalid image");
  const json res = transport_->post(
      "/depth", json{{"index", frame.index}, {"t", frame.t}, {"image", png_b64(frame.image)}});
  DepthMap depth;
  try {
    depth = decode_depth_pfm(base64_decode(field<std::string>(res, "depth")));
  } catch (const TransportError&) {
    throw;
  } catch (const Error& e) {
    malformed(std::string("depth: ") + e.what());
  }
  if (depth.width != frame.image.width || depth.height != frame.image.height) {
    malformed("depth map size differs from the frame");
  }
  return depth;
}

HttpJudge::HttpJudge(AdapterConfig config)
    : transport_(std::make_unique<HttpTransport>(std::move(config))) {}
HttpJudge::~HttpJudge() = default;

std::string HttpJudge::rank(const std::string& prompt,
                            const std::vector<FrameSequence>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kArgument, "nothing to rank");
  json videos = json::array();
  for (const FrameSequence& seq : candidates) {
    json frames = json::array();
    for (const Frame& f : seq) frames.push_back(png_b64(f.image));
    videos.push_back(std::move(frames));
  }
  const json res = transport_->post("/rank", json{{"prompt", prompt}, {"candidates", videos}});
  return field<std::string>(res, "text");
}

HttpPromptRewriter::HttpPromptRewriter(AdapterConfig config)
    : transport_(std::make_unique<HttpTransport>(std::move(config))) {}
HttpPromptRewriter::~HttpPromptRewriter() = default;

std::string HttpPromptRewriter::rewrite(std::string_view prompt, std::string_view instruction) {
  const json res = transport_->post(
      "/rewrite", json{{"prompt", std::string(prompt)}, {"instruction", std::string(instruction)}});
  return field<std::string>(res, "text");
}

}  // namespace vidnav
