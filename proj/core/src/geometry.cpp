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
#include "vidnav/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "vidnav/error.hpp"

namespace vidnav {

double wrap_angle(double radians) {
  double a = std::remainder(radians, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double angle_diff(double to, double from) { return wrap_angle(to - from); }

Mat3 rotation_z(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

bool Pose::is_valid(double tol) const {
  if (!position.allFinite() || !rotation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose Pose::renormalized() const {
  Eigen::JacobiSVD<Mat3> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return Pose{position, r};
}

Pose Pose::relative(const Pose& other) const {
  return Pose{rotation.transpose() * (other.position - position),
              rotation.transpose() * other.rotation};
}

Pose Pose::from_yaw(const Vec3& position, double yaw) {
  return Pose{position, rotation_z(yaw)};
}

void validate_waypoints(std::span<const Waypoint> waypoints) {
  for (size_t i = 0; i < waypoints.size(); ++i) {
    const Waypoint& w = waypoints[i];
    if (!std::isfinite(w.t) || !w.position().allFinite()) {
      throw Error(ErrorCode::kArgument,
                  "waypoint " + std::to_string(i) + " is not finite");
    }
    if (!(w.yaw > -kPi && w.yaw <= kPi)) {
      throw Error(ErrorCode::kArgument,
                  "waypoint " + std::to_string(i) + " yaw outside (-pi, pi]");
    }
    if (i > 0 && !(w.t > waypoints[i - 1].t)) {
      throw Error(ErrorCode::kArgument,
                  "waypoint times must be strictly increasing at index " +
                      std::to_string(i));
    }
  }
}

size_t PixelMask::count() const {
  return static_cast<size_t>(std::count_if(
      bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

TrajectorySample Trajectory::sample_at(double t) const {
  if (samples.empty()) return {};
  if (t <= samples.front().t) return samples.front();
  if (t >= samples.back().t) return samples.back();
  auto hi = std::upper_bound(
      samples.begin(), samples.end(), t,
      [](double value, const TrajectorySample& s) { return value < s.t; });
  auto lo = hi - 1;
  const double span = hi->t - lo->t;
  const double f = span > 0.0 ? (t - lo->t) / span : 0.0;
  TrajectorySample out;
  out.t = t;
  out.position = lo->position + f * (hi->position - lo->position);
  out.velocity = lo->velocity + f * (hi->velocity - lo->velocity);
  out.acceleration = lo->acceleration + f * (hi->acceleration - lo->acceleration);
  out.yaw = wrap_angle(lo->yaw + f * angle_diff(hi->yaw, lo->yaw));
  return out;
}

std::optional<std::string> trajectory_violation(const Trajectory& trajectory,
                                                const KinematicLimits& limits,
                                                double tol) {
  const auto& s = trajectory.samples;
  if (s.empty()) return "trajectory has no samples";
  if (s.front().t != 0.0) return "trajectory does not start at t = 0";
  for (size_t i = 0; i < s.size(); ++i) {
    std::ostringstream msg;
    if (i > 0 && !(s[i].t > s[i - 1].t)) {
      msg << "time not strictly increasing at sample " << i;
      return msg.str();
    }
    if (s[i].velocity.norm() > limits.vmax + tol) {
      msg << "speed " << s[i].velocity.norm() << " exceeds vmax "
          << limits.vmax << " at t=" << s[i].t;
      return msg.str();
    }
    if (s[i].acceleration.norm() > limits.amax + tol) {
      msg << "acceleration " << s[i].acceleration.norm() << " exceeds amax "
          << limits.amax << " at t=" << s[i].t;
      return msg.str();
    }
  }
  return std::nullopt;
}

double yaw_from_pose(const Pose& pose) {
  const Vec3 f = pose.forward().normalized();
  const double horizontal = std::hypot(f.x(), f.y());
  if (horizontal < 1e-6) {
    throw Error(ErrorCode::kYawDegenerate,
                "forward axis is vertical, heading undefined");
  }
  return wrap_angle(std::atan2(f.y(), f.x()));
}

std::vector<double> yaw_from_motion(std::span<const Waypoint> waypoints,
                                    double initial_yaw) {
  std::vector<double> yaws(waypoints.size(), wrap_angle(initial_yaw));
  double last = wrap_angle(initial_yaw);
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Vec3 d = waypoints[i + 1].position() - waypoints[i].position();
    if (std::hypot(d.x(), d.y()) > 1e-9) last = wrap_angle(std::atan2(d.y(), d.x()));
    yaws[i] = last;
  }
  if (!yaws.empty()) yaws.back() = last;
  return yaws;
}

FiniteDiffPeaks finite_diff_peaks(std::span<const Waypoint> waypoints) {
  if (waypoints.size() < 2) {
    throw Error(ErrorCode::kInsufficientWaypoints,
                "need at least 2 waypoints, got " +
                    std::to_string(waypoints.size()));
  }
  std::vector<Vec3> velocities;
  std::vector<double> mid_times;
  FiniteDiffPeaks peaks;
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double dt = waypoints[i + 1].t - waypoints[i].t;
    if (!(dt > 0.0)) {
      throw Error(ErrorCode::kArgument, "waypoint times must increase");
    }
    const Vec3 v = (waypoints[i + 1].position() - waypoints[i].position()) / dt;
    velocities.push_back(v);
    mid_times.push_back(0.5 * (waypoints[i].t + waypoints[i + 1].t));
    peaks.vmax = std::max(peaks.vmax, v.norm());
  }
  if (velocities.size() >= 2) {
    double amax = 0.0;
    for (size_t i = 0; i + 1 < velocities.size(); ++i) {
      const double dt = mid_times[i + 1] - mid_times[i];
      amax = std::max(amax, (velocities[i + 1] - velocities[i]).norm() / dt);
    }
    peaks.amax = amax;
  }
  return peaks;
}

KinematicLimits finite_diff_limits(std::span<const Waypoint> waypoints,
                                   const LimitFloors& floors) {
  const FiniteDiffPeaks peaks = finite_diff_peaks(waypoints);
  KinematicLimits limits;
  limits.vmax = std::max(peaks.vmax, floors.v_floor);
  limits.amax = peaks.amax ? std::max(*peaks.amax, floors.a_floor)
                           : floors.a_fallback;
  return limits;
}

double relative_scale_error(double s, double s_gt) {
  if (!(s_gt > 0.0)) {
    throw Error(ErrorCode::kDomain, "ground-truth scale must be positive");
  }
  return std::abs(s - s_gt) / s_gt;
}

namespace {

bool skip_line(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

void write_waypoints(std::ostream& out, std::span<const Waypoint> waypoints) {
  out << std::setprecision(17);
  for (const Waypoint& w : waypoints) {
    out << w.t << ' ' << w.x << ' ' << w.y << ' ' << w.z << ' ' << w.yaw
        << '\n';
  }
}

WaypointSequence read_waypoints(std::istream& in) {
  WaypointSequence out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    Waypoint w;
    if (!(fields >> w.t >> w.x >> w.y >> w.z >> w.yaw)) {
      throw Error(ErrorCode::kInput, "malformed waypoint record at line " +
                                         std::to_string(line_no));
    }
    out.push_back(w);
  }
  return out;
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  out << std::setprecision(17);
  if (!trajectory.knots.empty()) {
    out << "# knots";
    for (double k : trajectory.knots) out << ' ' << k;
    out << '\n';
  }
  for (const TrajectorySample& s : trajectory.samples) {
    out << s.t << ' ' << s.position.x() << ' ' << s.position.y() << ' '
        << s.position.z() << ' ' << s.velocity.x() << ' ' << s.velocity.y()
        << ' ' << s.velocity.z() << ' ' << s.acceleration.x() << ' '
        << s.acceleration.y() << ' ' << s.acceleration.z() << ' ' << s.yaw
        << '\n';
  }
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# knots", 0) == 0) {
      std::istringstream fields(line.substr(7));
      double k;
      while (fields >> k) out.knots.push_back(k);
      continue;
    }
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    TrajectorySample s;
    if (!(fields >> s.t >> s.position.x() >> s.position.y() >> s.position.z() >>
          s.velocity.x() >> s.velocity.y() >> s.velocity.z() >>
          s.acceleration.x() >> s.acceleration.y() >> s.acceleration.z() >>
          s.yaw)) {
      throw Error(ErrorCode::kInput, "malformed trajectory record at line " +
                                         std::to_string(line_no));
    }
    out.samples.push_back(s);
  }
  return out;
}

}  // namespace vidnav
