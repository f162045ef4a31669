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
#include "vidnav/scale.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "vidnav/error.hpp"

namespace vidnav {

void ScaleConfig::validate() const {
  if (!(tau_min > 0.0 && tau_min < tau_max)) {
    throw Error(ErrorCode::kConfig, "need 0 < tau_min < tau_max");
  }
  if (min_valid_pixels < 1) {
    throw Error(ErrorCode::kConfig, "min_valid_pixels must be >= 1");
  }
  if (pixel_stride < 1) {
    throw Error(ErrorCode::kConfig, "pixel_stride must be >= 1");
  }
}

namespace {

void check_shapes(const DepthMap& depth, const PointMap& points) {
  if (depth.width != points.width || depth.height != points.height) {
    throw Error(ErrorCode::kShape,
                "depth map is " + std::to_string(depth.width) + "x" +
                    std::to_string(depth.height) + " but pointmap is " +
                    std::to_string(points.width) + "x" +
                    std::to_string(points.height));
  }
}

inline bool pixel_valid(float depth, float z_pred, const ScaleConfig& config) {
  return std::isfinite(depth) && std::isfinite(z_pred) &&
         depth > config.tau_min && depth < config.tau_max && z_pred > 0.0f;
}

}  // namespace

PixelMask build_mask(const DepthMap& depth_ref, const PointMap& pointmap,
                     const ScaleConfig& config) {
  config.validate();
  check_shapes(depth_ref, pointmap);
  PixelMask mask(depth_ref.width, depth_ref.height);
  for (size_t i = 0; i < mask.bits.size(); ++i) {
    mask.bits[i] = pixel_valid(depth_ref.depth[i], pointmap.points[i].z(), config);
  }
  return mask;
}

std::vector<double> frame_ratios(const GeometryFrame& frame,
                                 const ScaleConfig& config) {
  check_shapes(frame.depth, frame.points);
  std::vector<double> ratios;
  const int stride = config.pixel_stride;
  for (int v = 0; v < frame.depth.height; v += stride) {
    for (int u = 0; u < frame.depth.width; u += stride) {
      const float d = frame.depth.at(u, v);
      const float z = frame.points.at(u, v).z();
      if (pixel_valid(d, z, config)) {
        ratios.push_back(static_cast<double>(d) / static_cast<double>(z));
      }
    }
  }
  return ratios;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kArgument, "median of an empty set");
  }
  const size_t k = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(k),
                   values.end());
  return values[k];
}

ScaleEstimate estimate_scale(std::span<const GeometryFrame> frames,
                             const ScaleConfig& config) {
  config.validate();
  if (frames.empty()) {
    throw Error(ErrorCode::kArgument, "scale estimation needs at least 1 frame");
  }
  for (const auto& f : frames) check_shapes(f.depth, f.points);

  // Frames pool independently; the merge below runs in frame order.
  std::vector<std::future<std::vector<double>>> jobs;
  jobs.reserve(frames.size());
  for (const auto& f : frames) {
    jobs.push_back(std::async(std::launch::async, [&f, &config] {
      return frame_ratios(f, config);
    }));
  }

  ScaleEstimate estimate;
  std::vector<double> pooled;
  for (auto& job : jobs) {
    std::vector<double> ratios = job.get();
    estimate.per_frame_counts.push_back(ratios.size());
    estimate.per_frame_medians.push_back(
        ratios.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : lower_median(ratios));
    pooled.insert(pooled.end(), ratios.begin(), ratios.end());
  }
  estimate.valid_pixel_count = pooled.size();
  if (pooled.size() < static_cast<size_t>(config.min_valid_pixels)) {
    throw Error(ErrorCode::kScaleIndeterminate,
                std::to_string(pooled.size()) + " valid pixels, need " +
                    std::to_string(config.min_valid_pixels));
  }
  if (config.consensus == Consensus::kMean) {
    estimate.scale = std::accumulate(pooled.begin(), pooled.end(), 0.0) /
                     static_cast<double>(pooled.size());
  } else {
    estimate.scale = lower_median(std::move(pooled));
  }
  return estimate;
}

WaypointSequence apply_scale(double scale, std::span<const Waypoint> waypoints) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kDomain, "scale must be positive and finite");
  }
  WaypointSequence out(waypoints.begin(), waypoints.end());
  for (Waypoint& w : out) w.set_position(scale * w.position());
  return out;
}

std::string scale_report(const ScaleEstimate& estimate) {
  nlohmann::json j;
  j["scale"] = estimate.scale;
  j["valid_pixel_count"] = estimate.valid_pixel_count;
  j["per_frame_counts"] = estimate.per_frame_counts;
  nlohmann::json medians = nlohmann::json::array();
  for (double m : estimate.per_frame_medians) {
    if (std::isnan(m)) {
      medians.push_back(nullptr);
    } else {
      medians.push_back(m);
    }
  }
  j["per_frame_medians"] = medians;
  return j.dump(2) + "\n";
}

ScaleEstimate parse_scale_report(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ScaleEstimate e;
    e.scale = j.at("scale").get<double>();
    e.valid_pixel_count = j.at("valid_pixel_count").get<size_t>();
    e.per_frame_counts = j.at("per_frame_counts").get<std::vector<size_t>>();
    for (const auto& m : j.at("per_frame_medians")) {
      e.per_frame_medians.push_back(
          m.is_null() ? std::numeric_limits<double>::quiet_NaN() : m.get<double>());
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kInput, std::string("bad scale report: ") + ex.what());
  }
}

}  // namespace vidnav
