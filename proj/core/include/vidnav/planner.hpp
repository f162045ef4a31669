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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vidnav/geometry.hpp"

namespace vidnav {

struct GridIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  bool operator==(const GridIndex&) const = default;
};

// Axis-aligned voxel occupancy. Cell (i, j, k) spans
// origin + [i, i+1) * resolution along each axis; distances to obstacles are
// measured to occupied cell centers.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(const Vec3& origin, double resolution, std::array<int, 3> dims);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const std::array<int, 3>& dims() const { return dims_; }
  size_t cell_count() const { return occupancy_.size(); }

  bool in_bounds(const GridIndex& c) const;
  bool contains(const Vec3& p) const;
  std::optional<GridIndex> cell_of(const Vec3& p) const;
  Vec3 center(const GridIndex& c) const;

  bool occupied(const GridIndex& c) const { return occupancy_[linear(c)] != 0; }
  void set_occupied(const GridIndex& c, bool value = true);
  // Marks every cell whose center lies inside the box.
  void fill_box(const Vec3& lo, const Vec3& hi);

  size_t linear(const GridIndex& c) const {
    return (static_cast<size_t>(c.z) * dims_[1] + c.y) * dims_[0] + c.x;
  }
  GridIndex unlinear(size_t i) const;

  std::vector<Vec3> occupied_centers() const;

  // Distance from `p` to the nearest occupied center, looking only at
  // cells within `radius`; +inf when none is that close.
  double nearest_occupied(const Vec3& p, double radius) const;
  // Minimum distance from segment [a, b] to occupied centers within
  // `radius` of the segment; +inf when none.
  double segment_clearance(const Vec3& a, const Vec3& b, double radius) const;

  const std::vector<std::uint8_t>& raw() const { return occupancy_; }

 private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 1.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<std::uint8_t> occupancy_;
};

// Voxel text format:
//   origin <x> <y> <z>
//   resolution <r>
//   dims <nx> <ny> <nz>
//   <count>:<0|1> ...   (run-length body, x fastest, then y, then z)
std::string write_grid(const OccupancyGrid& grid);
OccupancyGrid parse_grid(const std::string& text);

struct WaypointQueue {
  WaypointSequence waypoints;
  size_t current_index = 0;
  double switch_threshold = 0.5;  // meters
};

enum class TargetKind { kTarget, kAdvanced, kDone };

struct TargetUpdate {
  TargetKind kind = TargetKind::kTarget;
  std::optional<Waypoint> waypoint;  // empty when kDone
  size_t index = 0;                  // queue index of `waypoint`
  size_t reached = 0;                // waypoints passed by this call
};

// Advances past every waypoint closer than the switch threshold.
TargetUpdate next_target(WaypointQueue& queue, const Vec3& position);

// Shortest 26-connected path over cells at least `clearance` from any
// occupied center, with every edge checked continuously, then pruned by
// line of sight. Returns start, intermediate vertices and goal.
std::vector<Vec3> plan_segment(const OccupancyGrid& grid, const Vec3& start,
                               const Vec3& goal, double clearance);

double path_length(std::span<const Vec3> path);

struct TimingConfig {
  double dt = 0.05;               // sample period, s
  double corner_clearance = 0.3;  // m, sets the corner speed cap
  // Vertices turning by less than this are treated as straight.
  double corner_angle = 0.05;     // rad
};

// Trapezoidal speed profile along the polyline. Speed is zero at both ends
// and at most sqrt(amax * corner_clearance) through turning vertices.
// Trajectory::knots holds the arrival time at every input vertex.
Trajectory time_parameterize(std::span<const Vec3> path,
                             const KinematicLimits& limits,
                             const TimingConfig& timing = {});

// Rate-limited pursuit of the upcoming waypoint's yaw along the shortest
// arc. Waypoint arrival times come from trajectory.knots when they match
// the waypoint count, otherwise from rescaling waypoint time onto the
// trajectory duration.
Trajectory yaw_schedule(std::span<const Waypoint> waypoints,
                        const Trajectory& trajectory, double max_yaw_rate);

struct PlannerConfig {
  double switch_threshold = 0.5;
  double clearance = 0.3;
  double dt = 0.05;
  double max_yaw_rate = 1.5;
  double corner_angle = 0.05;
  LimitFloors floors;
};

struct PlanResult {
  std::vector<Vec3> path;
  Trajectory trajectory;
  KinematicLimits limits;
  double clearance = 0.0;
};

// One plan_segment per consecutive waypoint pair, concatenated and timed
// under limits from the waypoints' own finite differences.
PlanResult plan_mission(const OccupancyGrid& grid,
                        std::span<const Waypoint> waypoints,
                        const PlannerConfig& config = {});

}  // namespace vidnav
