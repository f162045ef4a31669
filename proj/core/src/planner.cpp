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
#include "vidnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "vidnav/error.hpp"

namespace vidnav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

OccupancyGrid::OccupancyGrid(const Vec3& origin, double resolution,
                             std::array<int, 3> dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (!(resolution > 0.0)) {
    throw Error(ErrorCode::kArgument, "grid resolution must be positive");
  }
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw Error(ErrorCode::kArgument, "grid dims must be positive");
  }
  occupancy_.assign(static_cast<size_t>(dims[0]) * dims[1] * dims[2], 0);
}

bool OccupancyGrid::in_bounds(const GridIndex& c) const {
  return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < dims_[0] &&
         c.y < dims_[1] && c.z < dims_[2];
}

bool OccupancyGrid::contains(const Vec3& p) const {
  return cell_of(p).has_value();
}

std::optional<GridIndex> OccupancyGrid::cell_of(const Vec3& p) const {
  const Vec3 rel = (p - origin_) / resolution_;
  GridIndex c{static_cast<int>(std::floor(rel.x())),
              static_cast<int>(std::floor(rel.y())),
              static_cast<int>(std::floor(rel.z()))};
  if (!rel.allFinite() || !in_bounds(c)) return std::nullopt;
  return c;
}

Vec3 OccupancyGrid::center(const GridIndex& c) const {
  return origin_ + resolution_ * Vec3(c.x + 0.5, c.y + 0.5, c.z + 0.5);
}

void OccupancyGrid::set_occupied(const GridIndex& c, bool value) {
  if (!in_bounds(c)) throw Error(ErrorCode::kArgument, "cell out of bounds");
  occupancy_[linear(c)] = value ? 1 : 0;
}

void OccupancyGrid::fill_box(const Vec3& lo, const Vec3& hi) {
  for (size_t i = 0; i < occupancy_.size(); ++i) {
    const Vec3 p = center(unlinear(i));
    if ((p.array() >= lo.array()).all() && (p.array() <= hi.array()).all()) {
      occupancy_[i] = 1;
    }
  }
}

GridIndex OccupancyGrid::unlinear(size_t i) const {
  GridIndex c;
  c.x = static_cast<int>(i % dims_[0]);
  i /= dims_[0];
  c.y = static_cast<int>(i % dims_[1]);
  c.z = static_cast<int>(i / dims_[1]);
  return c;
}

std::vector<Vec3> OccupancyGrid::occupied_centers() const {
  std::vector<Vec3> out;
  for (size_t i = 0; i < occupancy_.size(); ++i) {
    if (occupancy_[i]) out.push_back(center(unlinear(i)));
  }
  return out;
}

double OccupancyGrid::nearest_occupied(const Vec3& p, double radius) const {
  return segment_clearance(p, p, radius);
}

double OccupancyGrid::segment_clearance(const Vec3& a, const Vec3& b,
                                        double radius) const {
  const Vec3 lo = a.cwiseMin(b).array() - radius;
  const Vec3 hi = a.cwiseMax(b).array() + radius;
  auto to_cell = [&](double v, int axis) {
    return static_cast<int>(std::floor((v - origin_[axis]) / resolution_));
  };
  const int x0 = std::max(0, to_cell(lo.x(), 0));
  const int y0 = std::max(0, to_cell(lo.y(), 1));
  const int z0 = std::max(0, to_cell(lo.z(), 2));
  const int x1 = std::min(dims_[0] - 1, to_cell(hi.x(), 0));
  const int y1 = std::min(dims_[1] - 1, to_cell(hi.y(), 1));
  const int z1 = std::min(dims_[2] - 1, to_cell(hi.z(), 2));
  double best = kInf;
  for (int z = z0; z <= z1; ++z) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const GridIndex c{x, y, z};
        if (!occupancy_[linear(c)]) continue;
        const double d = point_segment_distance(center(c), a, b);
        if (d <= radius) best = std::min(best, d);
      }
    }
  }
  return best;
}

std::string write_grid(const OccupancyGrid& grid) {
  std::ostringstream out;
  out.precision(17);
  out << "origin " << grid.origin().x() << ' ' << grid.origin().y() << ' '
      << grid.origin().z() << '\n';
  out << "resolution " << grid.resolution() << '\n';
  out << "dims " << grid.dims()[0] << ' ' << grid.dims()[1] << ' '
      << grid.dims()[2] << '\n';
  const auto& raw = grid.raw();
  size_t i = 0;
  int runs_on_line = 0;
  while (i < raw.size()) {
    size_t j = i;
    while (j < raw.size() && raw[j] == raw[i]) ++j;
    out << (j - i) << ':' << int(raw[i]);
    out << (++runs_on_line % 16 == 0 ? '\n' : ' ');
    i = j;
  }
  out << '\n';
  return out.str();
}

OccupancyGrid parse_grid(const std::string& text) {
  std::istringstream in(text);
  Vec3 origin = Vec3::Zero();
  double resolution = 0.0;
  std::array<int, 3> dims{0, 0, 0};
  bool have_origin = false, have_res = false, have_dims = false;
  std::string token;
  std::vector<std::uint8_t> cells;
  while (in >> token) {
    if (token[0] == '#') {
      std::string rest;
      std::getline(in, rest);
    } else if (token == "origin") {
      have_origin = static_cast<bool>(in >> origin.x() >> origin.y() >> origin.z());
    } else if (token == "resolution") {
      have_res = static_cast<bool>(in >> resolution);
    } else if (token == "dims") {
      have_dims = static_cast<bool>(in >> dims[0] >> dims[1] >> dims[2]);
    } else {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::kInput, "unexpected grid token '" + token + "'");
      }
      size_t count = 0;
      int value = 0;
      try {
        count = std::stoul(token.substr(0, colon));
        value = std::stoi(token.substr(colon + 1));
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kInput, "bad run '" + token + "'");
      }
      if (value != 0 && value != 1) {
        throw Error(ErrorCode::kInput, "run value must be 0 or 1");
      }
      cells.insert(cells.end(), count, static_cast<std::uint8_t>(value));
    }
  }
  if (!have_origin || !have_res || !have_dims) {
    throw Error(ErrorCode::kInput, "grid header needs origin, resolution, dims");
  }
  OccupancyGrid grid(origin, resolution, dims);
  if (cells.size() != grid.cell_count()) {
    throw Error(ErrorCode::kInput, "grid body has " + std::to_string(cells.size()) +
                                       " cells, header declares " +
                                       std::to_string(grid.cell_count()));
  }
  for (size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) grid.set_occupied(grid.unlinear(i));
  }
  return grid;
}

TargetUpdate next_target(WaypointQueue& queue, const Vec3& position) {
  if (queue.waypoints.empty()) {
    throw Error(ErrorCode::kArgument, "waypoint queue is empty");
  }
  TargetUpdate update;
  while (queue.current_index < queue.waypoints.size() &&
         (queue.waypoints[queue.current_index].position() - position).norm() <
             queue.switch_threshold) {
    ++queue.current_index;
    ++update.reached;
  }
  if (queue.current_index >= queue.waypoints.size()) {
    update.kind = TargetKind::kDone;
    update.index = queue.waypoints.size();
    return update;
  }
  update.kind = update.reached > 0 ? TargetKind::kAdvanced : TargetKind::kTarget;
  update.index = queue.current_index;
  update.waypoint = queue.waypoints[queue.current_index];
  return update;
}

double path_length(std::span<const Vec3> path) {
  double total = 0.0;
  for (size_t i = 1; i < path.size(); ++i) total += (path[i] - path[i - 1]).norm();
  return total;
}

std::vector<Vec3> plan_segment(const OccupancyGrid& grid, const Vec3& start,
                               const Vec3& goal, double clearance) {
  if (!(clearance >= 0.0)) {
    throw Error(ErrorCode::kArgument, "clearance must be non-negative");
  }
  const auto start_cell = grid.cell_of(start);
  const auto goal_cell = grid.cell_of(goal);
  if (!start_cell) throw Error(ErrorCode::kArgument, "start is outside the grid");
  if (!goal_cell) throw Error(ErrorCode::kArgument, "goal is outside the grid");
  if (grid.nearest_occupied(goal, clearance) < clearance) {
    throw Error(ErrorCode::kGoalOccluded, "goal lies inside an inflated obstacle");
  }
  if (grid.nearest_occupied(start, clearance) < clearance) {
    throw Error(ErrorCode::kStartOccluded, "start lies inside an inflated obstacle");
  }
  auto segment_clear = [&](const Vec3& a, const Vec3& b) {
    return grid.segment_clearance(a, b, clearance) >= clearance;
  };
  if (segment_clear(start, goal)) return {start, goal};

  const double res = grid.resolution();
  const double half_diag = 0.5 * res * std::sqrt(3.0);
  const size_t n = grid.cell_count();
  // Clearance of each cell center, exact up to clearance + one diagonal,
  // filled on first use.
  std::vector<double> near_cache(n, std::numeric_limits<double>::quiet_NaN());
  auto near = [&](size_t i) {
    if (std::isnan(near_cache[i])) {
      near_cache[i] = grid.nearest_occupied(grid.center(grid.unlinear(i)),
                                            clearance + 2.0 * half_diag);
    }
    return near_cache[i];
  };
  auto edge_clear = [&](size_t a, size_t b) {
    const Vec3 pa = grid.center(grid.unlinear(a));
    const Vec3 pb = grid.center(grid.unlinear(b));
    const double reach = clearance + 0.5 * (pa - pb).norm();
    if (near(a) >= reach && near(b) >= reach) return true;
    return segment_clear(pa, pb);
  };

  const size_t goal_node = n;
  std::vector<double> g(n + 1, kInf);
  std::vector<size_t> parent(n + 1, std::numeric_limits<size_t>::max());
  std::vector<std::uint8_t> closed(n + 1, 0);
  using Entry = std::pair<double, size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  auto heuristic = [&](size_t i) {
    return i == goal_node ? 0.0 : (grid.center(grid.unlinear(i)) - goal).norm();
  };
  auto neighbours = [&](const GridIndex& c, auto&& fn) {
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const GridIndex m{c.x + dx, c.y + dy, c.z + dz};
          if (grid.in_bounds(m)) fn(m);
        }
      }
    }
  };
  auto seed_from = [&](const GridIndex& c) {
    const size_t i = grid.linear(c);
    if (near(i) < clearance) return;
    const Vec3 p = grid.center(c);
    if (!segment_clear(start, p)) return;
    const double cost = (p - start).norm();
    if (cost < g[i]) {
      g[i] = cost;
      open.emplace(cost + heuristic(i), i);
    }
  };
  seed_from(*start_cell);
  neighbours(*start_cell, seed_from);

  std::vector<std::uint8_t> goal_adjacent(n, 0);
  auto mark_goal = [&](const GridIndex& c) {
    const size_t i = grid.linear(c);
    if (near(i) >= clearance && segment_clear(grid.center(c), goal)) {
      goal_adjacent[i] = 1;
    }
  };
  mark_goal(*goal_cell);
  neighbours(*goal_cell, mark_goal);

  while (!open.empty()) {
    const auto [f, i] = open.top();
    open.pop();
    if (closed[i]) continue;
    closed[i] = 1;
    if (i == goal_node) break;
    const GridIndex c = grid.unlinear(i);
    const Vec3 pc = grid.center(c);
    if (goal_adjacent[i]) {
      const double cost = g[i] + (goal - pc).norm();
      if (cost < g[goal_node]) {
        g[goal_node] = cost;
        parent[goal_node] = i;
        open.emplace(cost, goal_node);
      }
    }
    neighbours(c, [&](const GridIndex& m) {
      const size_t j = grid.linear(m);
      if (closed[j] || near(j) < clearance) return;
      const double cost = g[i] + (grid.center(m) - pc).norm();
      if (cost >= g[j]) return;
      if (!edge_clear(i, j)) return;
      g[j] = cost;
      parent[j] = i;
      open.emplace(cost + heuristic(j), j);
    });
  }
  if (!closed[goal_node]) {
    throw Error(ErrorCode::kUnreachable, "no collision-free path to goal");
  }

  std::vector<Vec3> raw{goal};
  for (size_t i = parent[goal_node]; i != std::numeric_limits<size_t>::max();
       i = parent[i]) {
    raw.push_back(grid.center(grid.unlinear(i)));
  }
  raw.push_back(start);
  std::reverse(raw.begin(), raw.end());

  // Line-of-sight pruning: from each anchor jump to the farthest visible
  // vertex. Triangle inequality keeps the result no longer than `raw`.
  std::vector<Vec3> pruned{raw.front()};
  size_t anchor = 0;
  while (anchor + 1 < raw.size()) {
    size_t next = anchor + 1;
    for (size_t j = raw.size() - 1; j > anchor + 1; --j) {
      if (segment_clear(raw[anchor], raw[j])) {
        next = j;
        break;
      }
    }
    pruned.push_back(raw[next]);
    anchor = next;
  }
  return pruned;
}

namespace {

struct SegmentProfile {
  Vec3 origin;
  Vec3 direction;
  double length = 0.0;
  double v0 = 0.0, v1 = 0.0, vp = 0.0;
  double t_acc = 0.0, t_cruise = 0.0, t_dec = 0.0;
  double d_acc = 0.0, d_cruise = 0.0;
  double start_time = 0.0;

  double duration() const { return t_acc + t_cruise + t_dec; }
};

struct ProfileState {
  double s = 0.0;
  double speed = 0.0;
  double accel = 0.0;
};

ProfileState evaluate(const SegmentProfile& seg, double tau, double a) {
  tau = std::clamp(tau, 0.0, seg.duration());
  if (tau < seg.t_acc) {
    return {seg.v0 * tau + 0.5 * a * tau * tau, seg.v0 + a * tau, a};
  }
  tau -= seg.t_acc;
  if (tau < seg.t_cruise) {
    return {seg.d_acc + seg.vp * tau, seg.vp, 0.0};
  }
  tau -= seg.t_cruise;
  const double s = seg.d_acc + seg.d_cruise + seg.vp * tau - 0.5 * a * tau * tau;
  return {std::min(s, seg.length), std::max(seg.vp - a * tau, 0.0), -a};
}

}  // namespace

Trajectory time_parameterize(std::span<const Vec3> path,
                             const KinematicLimits& limits,
                             const TimingConfig& timing) {
  if (path.empty()) throw Error(ErrorCode::kArgument, "path has no points");
  if (!limits.is_valid()) {
    throw Error(ErrorCode::kArgument, "kinematic limits must be positive");
  }
  if (!(timing.dt > 0.0)) throw Error(ErrorCode::kArgument, "dt must be positive");

  // Collapse repeated vertices, remembering where each input vertex went.
  std::vector<Vec3> pts{path.front()};
  std::vector<size_t> vertex_of(path.size(), 0);
  for (size_t i = 1; i < path.size(); ++i) {
    if ((path[i] - pts.back()).norm() > 1e-9) pts.push_back(path[i]);
    vertex_of[i] = pts.size() - 1;
  }

  Trajectory out;
  if (pts.size() == 1) {
    TrajectorySample hover;
    hover.position = pts.front();
    out.samples.push_back(hover);
    out.knots.assign(path.size(), 0.0);
    return out;
  }

  const double a = limits.amax;
  const size_t m = pts.size() - 1;  // segments
  std::vector<SegmentProfile> segs(m);
  for (size_t i = 0; i < m; ++i) {
    segs[i].origin = pts[i];
    segs[i].length = (pts[i + 1] - pts[i]).norm();
    segs[i].direction = (pts[i + 1] - pts[i]) / segs[i].length;
  }

  std::vector<double> cap(m + 1, limits.vmax);
  cap.front() = cap.back() = 0.0;
  const double corner_speed = std::sqrt(a * timing.corner_clearance);
  for (size_t j = 1; j < m; ++j) {
    const double c = std::clamp(segs[j - 1].direction.dot(segs[j].direction), -1.0, 1.0);
    if (std::acos(c) > timing.corner_angle) {
      cap[j] = std::min(cap[j], corner_speed);
    }
  }
  std::vector<double> v(cap);
  for (size_t j = 0; j < m; ++j) {
    v[j + 1] = std::min(v[j + 1], std::sqrt(v[j] * v[j] + 2.0 * a * segs[j].length));
  }
  for (size_t j = m; j-- > 0;) {
    v[j] = std::min(v[j], std::sqrt(v[j + 1] * v[j + 1] + 2.0 * a * segs[j].length));
  }

  double clock = 0.0;
  std::vector<double> vertex_time(m + 1, 0.0);
  for (size_t j = 0; j < m; ++j) {
    SegmentProfile& s = segs[j];
    s.v0 = v[j];
    s.v1 = v[j + 1];
    s.vp = std::min(limits.vmax,
                    std::sqrt(a * s.length + 0.5 * (s.v0 * s.v0 + s.v1 * s.v1)));
    s.vp = std::max({s.vp, s.v0, s.v1});
    s.t_acc = (s.vp - s.v0) / a;
    s.t_dec = (s.vp - s.v1) / a;
    s.d_acc = (s.vp * s.vp - s.v0 * s.v0) / (2.0 * a);
    const double d_dec = (s.vp * s.vp - s.v1 * s.v1) / (2.0 * a);
    s.d_cruise = std::max(0.0, s.length - s.d_acc - d_dec);
    s.t_cruise = s.vp > 0.0 ? s.d_cruise / s.vp : 0.0;
    s.start_time = clock;
    clock += s.duration();
    vertex_time[j + 1] = clock;
  }
  const double total = clock;

  auto sample = [&](double t) {
    auto it = std::upper_bound(
        segs.begin(), segs.end(), t,
        [](double value, const SegmentProfile& s) { return value < s.start_time; });
    const SegmentProfile& s = *(it == segs.begin() ? it : it - 1);
    const ProfileState st = evaluate(s, t - s.start_time, a);
    TrajectorySample out_s;
    out_s.t = t;
    out_s.position = s.origin + st.s * s.direction;
    out_s.velocity = st.speed * s.direction;
    out_s.acceleration = st.accel * s.direction;
    return out_s;
  };

  const auto steps = static_cast<long>(std::ceil(total / timing.dt - 1e-9));
  for (long k = 0; k < steps; ++k) out.samples.push_back(sample(k * timing.dt));
  TrajectorySample last;
  last.t = total;
  last.position = pts.back();
  out.samples.push_back(last);

  out.knots.resize(path.size());
  for (size_t i = 0; i < path.size(); ++i) out.knots[i] = vertex_time[vertex_of[i]];
  return out;
}

Trajectory yaw_schedule(std::span<const Waypoint> waypoints,
                        const Trajectory& trajectory, double max_yaw_rate) {
  Trajectory out = trajectory;
  if (waypoints.empty() || out.samples.empty()) return out;
  const double rate = std::max(max_yaw_rate, 0.0);

  std::vector<double> arrival(waypoints.size(), 0.0);
  if (trajectory.knots.size() == waypoints.size()) {
    arrival = trajectory.knots;
  } else {
    const double t0 = waypoints.front().t;
    const double span = waypoints.back().t - t0;
    for (size_t i = 0; i < waypoints.size(); ++i) {
      arrival[i] = span > 0.0
                       ? (waypoints[i].t - t0) / span * trajectory.duration()
                       : 0.0;
    }
  }
  auto target_at = [&](double t) {
    for (size_t i = 0; i < waypoints.size(); ++i) {
      if (arrival[i] > t) return waypoints[i].yaw;
    }
    return waypoints.back().yaw;
  };

  double yaw = wrap_angle(waypoints.front().yaw);
  out.samples.front().yaw = yaw;
  for (size_t i = 1; i < out.samples.size(); ++i) {
    const double dt = out.samples[i].t - out.samples[i - 1].t;
    const double want = angle_diff(target_at(out.samples[i - 1].t), yaw);
    const double step = std::clamp(want, -rate * dt, rate * dt);
    yaw = wrap_angle(yaw + step);
    out.samples[i].yaw = yaw;
  }
  return out;
}

PlanResult plan_mission(const OccupancyGrid& grid,
                        std::span<const Waypoint> waypoints,
                        const PlannerConfig& config) {
  if (waypoints.size() < 2) {
    throw Error(ErrorCode::kInsufficientWaypoints,
                "mission planning needs at least 2 waypoints");
  }
  PlanResult result;
  result.clearance = config.clearance;
  result.limits = finite_diff_limits(waypoints, config.floors);

  // Waypoint i lands at path vertex waypoint_vertex[i].
  std::vector<size_t> waypoint_vertex{0};
  result.path.push_back(waypoints.front().position());
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Vec3 a = waypoints[i].position();
    const Vec3 b = waypoints[i + 1].position();
    const auto leg = plan_segment(grid, a, b, config.clearance);
    result.path.insert(result.path.end(), leg.begin() + 1, leg.end());
    waypoint_vertex.push_back(result.path.size() - 1);
  }

  TimingConfig timing;
  timing.dt = config.dt;
  timing.corner_clearance = config.clearance;
  timing.corner_angle = config.corner_angle;
  Trajectory timed = time_parameterize(result.path, result.limits, timing);
  std::vector<double> knots;
  knots.reserve(waypoints.size());
  for (size_t v : waypoint_vertex) knots.push_back(timed.knots[v]);
  timed.knots = std::move(knots);
  result.trajectory = yaw_schedule(waypoints, timed, config.max_yaw_rate);
  return result;
}

}  // namespace vidnav
