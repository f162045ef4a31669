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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vidnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle into (-pi, pi]. Every yaw computation goes through here.
double wrap_angle(double radians);

// Signed shortest rotation taking `from` to `to`, in (-pi, pi].
double angle_diff(double to, double from);

Mat3 rotation_z(double yaw);

// Body frame is x forward, y left, z up. The world frame is gravity aligned
// with +z up and coincides with the first camera pose of a mission.
struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  Vec3 forward() const { return rotation.col(0); }

  // Orthonormal with det +1 within `tol`, finite position.
  bool is_valid(double tol = 1e-9) const;

  // Projects the rotation back onto SO(3).
  Pose renormalized() const;

  // Expresses `other` in this pose's frame.
  Pose relative(const Pose& other) const;

  static Pose from_yaw(const Vec3& position, double yaw);
};

struct Waypoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  Vec3 position() const { return {x, y, z}; }
  void set_position(const Vec3& p) {
    x = p.x();
    y = p.y();
    z = p.z();
  }
};

using WaypointSequence = std::vector<Waypoint>;

// Throws kArgument when t is not strictly increasing or a yaw lies outside
// (-pi, pi].
void validate_waypoints(std::span<const Waypoint> waypoints);

struct PointMap {
  int width = 0;
  int height = 0;
  // Row-major, top row first. Third component is predicted depth.
  std::vector<Eigen::Vector3f> points;

  PointMap() = default;
  PointMap(int w, int h)
      : width(w), height(h), points(static_cast<size_t>(w) * h,
                                    Eigen::Vector3f::Zero()) {}

  Eigen::Vector3f& at(int u, int v) { return points[index(u, v)]; }
  const Eigen::Vector3f& at(int u, int v) const { return points[index(u, v)]; }
  size_t index(int u, int v) const {
    return static_cast<size_t>(v) * width + u;
  }
};

struct DepthMap {
  static constexpr float kInvalid = std::numeric_limits<float>::infinity();

  int width = 0;
  int height = 0;
  std::vector<float> depth;  // meters, row-major, top row first

  DepthMap() = default;
  DepthMap(int w, int h, float fill = kInvalid)
      : width(w), height(h), depth(static_cast<size_t>(w) * h, fill) {}

  float& at(int u, int v) { return depth[index(u, v)]; }
  float at(int u, int v) const { return depth[index(u, v)]; }
  size_t index(int u, int v) const {
    return static_cast<size_t>(v) * width + u;
  }
};

struct PixelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  PixelMask() = default;
  PixelMask(int w, int h)
      : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

  bool at(int u, int v) const {
    return bits[static_cast<size_t>(v) * width + u] != 0;
  }
  size_t count() const;
};

struct KinematicLimits {
  double vmax = 1.0;  // m/s
  double amax = 1.0;  // m/s^2

  bool is_valid() const { return vmax > 0.0 && amax > 0.0; }
};

struct LimitFloors {
  double v_floor = 0.2;     // hover-heavy videos still yield a flyable speed
  double a_floor = 0.5;
  double a_fallback = 0.5;  // used when only one velocity sample exists
};

struct TrajectorySample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double yaw = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  // Arrival time of each planned waypoint, when known.
  std::vector<double> knots;

  double duration() const { return samples.empty() ? 0.0 : samples.back().t; }

  // Linear interpolation between samples; clamps to the ends.
  TrajectorySample sample_at(double t) const;
};

// Checks the time and limit invariants on every sample. Returns a
// description of the first violation, if any.
std::optional<std::string> trajectory_violation(const Trajectory& trajectory,
                                                const KinematicLimits& limits,
                                                double tol = 1e-6);

// Heading of the forward axis projected onto the horizontal plane.
// Throws kYawDegenerate when the forward axis is within 1e-6 of vertical.
double yaw_from_pose(const Pose& pose);

// Heading of the motion between consecutive positions; the last waypoint
// repeats the previous heading and stationary steps keep the prior heading.
std::vector<double> yaw_from_motion(std::span<const Waypoint> waypoints,
                                    double initial_yaw = 0.0);

struct FiniteDiffPeaks {
  double vmax = 0.0;
  std::optional<double> amax;  // absent with fewer than three waypoints
};

// Raw peak speed and acceleration by finite differences, no floors applied.
FiniteDiffPeaks finite_diff_peaks(std::span<const Waypoint> waypoints);

KinematicLimits finite_diff_limits(std::span<const Waypoint> waypoints,
                                   const LimitFloors& floors = {});

// |s - s_gt| / s_gt. Throws kDomain when s_gt <= 0.
double relative_scale_error(double s, double s_gt);

// Line-delimited "t x y z yaw" records.
void write_waypoints(std::ostream& out, std::span<const Waypoint> waypoints);
WaypointSequence read_waypoints(std::istream& in);

// "t x y z vx vy vz ax ay az yaw" records.
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trajectory(std::istream& in);

}  // namespace vidnav
