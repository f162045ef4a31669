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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vidnav/geometry.hpp"
#include "vidnav/image.hpp"
#include "vidnav/planner.hpp"
#include "vidnav/scale.hpp"

namespace vidnav {

struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  std::string label;
};

// Pinhole camera. The optical frame is x right, y down, z forward.
struct Intrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  bool is_valid() const {
    return fx > 0 && fy > 0 && cx > 0 && cy > 0 && width > 0 && height > 0;
  }
  // Same field of view at another raster size.
  Intrinsics resized(int w, int h) const;
};

// Columns are the optical axes expressed in the body frame.
Mat3 body_from_optical();

struct NoiseSpec {
  double depth_sigma = 0.0;       // multiplicative Gaussian, relative
  double outlier_fraction = 0.0;  // pixels whose depth/pred ratio is replaced
  double outlier_ratio_min = 5.0;
  double outlier_ratio_max = 50.0;
  std::uint64_t seed = 1;
};

struct SyntheticScene {
  std::vector<Box> obstacles;
  bool has_ground = true;
  double ground_height = 0.0;
  WaypointSequence gt_trajectory;  // world frame, metric
  Intrinsics intrinsics;
  double gt_scale = 1.0;  // metric units per decoder unit
  NoiseSpec noise;

  // Throws kConfig on bad intrinsics, gt_scale <= 0, fewer than 2 gt
  // waypoints, or a gt trajectory that enters an obstacle.
  void validate() const;

  // Ground-truth body pose at time t: positions and yaw interpolated
  // linearly between gt waypoints, clamped at the ends.
  Pose pose_at(double t) const;
};

SyntheticScene parse_scene(const std::string& json_text);
SyntheticScene load_scene(const std::filesystem::path& path);
std::string scene_to_json(const SyntheticScene& scene);

// Per pose: metric depth plus camera-frame points divided by gt_scale.
// Rays that hit nothing get DepthMap::kInvalid and a zero point. A zero
// width/height renders at the scene intrinsics.
GeometryFrame render_ground_truth(const SyntheticScene& scene, const Pose& pose,
                                  int width = 0, int height = 0);
std::vector<GeometryFrame> render_ground_truth(const SyntheticScene& scene,
                                               std::span<const Pose> poses,
                                               int width = 0, int height = 0);

// Flat-shaded object-id image with seeded per-pixel jitter.
Image render_frame(const SyntheticScene& scene, const Pose& pose, int width,
                   int height, std::uint64_t seed);

// Multiplicative depth noise plus outlier replacement (depth set to
// U[ratio_min, ratio_max] times the predicted depth). `stream` selects an
// independent random stream, typically the frame index.
void apply_depth_noise(DepthMap& depth, const PointMap& points,
                       const NoiseSpec& noise, std::uint64_t stream);

// Cells of the grid whose centers lie inside an obstacle or below ground.
OccupancyGrid voxelize(const SyntheticScene& scene, const Vec3& origin,
                       double resolution, std::array<int, 3> dims);

struct DroneState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
  double t = 0.0;
};

struct TrackingConfig {
  double bandwidth = 4.0;     // rad/s, critically damped error dynamics
  double accel_noise = 0.0;   // m/s^2 standard deviation of disturbance
  std::uint64_t seed = 0;
};

// Feed-forward plus proportional position/velocity law. The tracking
// error obeys e'' = -2w e' - w^2 e and is propagated in closed form, so a
// state on the trajectory stays on it. Past the end the final sample is
// held.
DroneState step(const DroneState& state, const Trajectory& trajectory, double dt,
                const TrackingConfig& config = {});

struct CollisionViolation {
  size_t sample = 0;
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 obstacle = Vec3::Zero();  // nearest occupied cell center
  double distance = 0.0;
};

struct CollisionReport {
  std::vector<CollisionViolation> violations;
  bool clear() const { return violations.empty(); }
};

CollisionReport check_collisions(const Trajectory& trajectory,
                                 const OccupancyGrid& grid, double clearance);

struct WaypointEvent {
  double t = 0.0;
  size_t index = 0;
  double distance = 0.0;  // drone-to-waypoint distance when it was passed
};

struct ExecutionLog {
  std::vector<DroneState> states;
  std::vector<WaypointEvent> events;
  double max_tracking_error = 0.0;
  bool completed = false;  // every waypoint passed in order
};

struct ExecutionConfig {
  double dt = 0.05;
  double switch_threshold = 0.5;
  double settle_time = 2.0;  // extra time after the trajectory ends
  TrackingConfig tracking;
};

// Closed loop: steps the drone along the trajectory while a waypoint queue
// watches the Euclidean switching rule.
ExecutionLog execute(const Trajectory& trajectory,
                     std::span<const Waypoint> waypoints,
                     const DroneState& start, const ExecutionConfig& config = {});

std::string execution_log_to_text(const ExecutionLog& log);

}  // namespace vidnav
