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
#include "vidnav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

namespace vidnav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Ray/box slab test; returns the entry parameter or +inf.
double intersect_box(const Vec3& o, const Vec3& d, const Box& b) {
  double t0 = 0.0, t1 = kInf;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (o[i] < b.min[i] || o[i] > b.max[i]) return kInf;
      continue;
    }
    double a = (b.min[i] - o[i]) / d[i];
    double c = (b.max[i] - o[i]) / d[i];
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return kInf;
  }
  return t0 > 0.0 ? t0 : kInf;
}

// Hit parameter along an optical ray whose z component is 1, so the
// parameter is the optical depth. id -1 = miss, 0 = ground, i+1 = box i.
struct Hit {
  double depth = kInf;
  int id = -1;
};

Hit cast(const SyntheticScene& scene, const Vec3& origin, const Vec3& dir) {
  Hit hit;
  if (scene.has_ground && dir.z() < 0.0 && origin.z() > scene.ground_height) {
    hit.depth = (scene.ground_height - origin.z()) / dir.z();
    hit.id = 0;
  }
  for (size_t i = 0; i < scene.obstacles.size(); ++i) {
    const double t = intersect_box(origin, dir, scene.obstacles[i]);
    if (t < hit.depth) {
      hit.depth = t;
      hit.id = static_cast<int>(i) + 1;
    }
  }
  return hit;
}

bool inside_box(const Vec3& p, const Box& b) {
  return (p.array() > b.min.array()).all() && (p.array() < b.max.array()).all();
}

Vec3 json_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kConfig, "expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Intrinsics Intrinsics::resized(int w, int h) const {
  Intrinsics out = *this;
  const double sx = static_cast<double>(w) / width;
  const double sy = static_cast<double>(h) / height;
  out.fx *= sx;
  out.cx *= sx;
  out.fy *= sy;
  out.cy *= sy;
  out.width = w;
  out.height = h;
  return out;
}

Mat3 body_from_optical() {
  Mat3 m;
  m.col(0) = Vec3(0, -1, 0);  // optical x = body right
  m.col(1) = Vec3(0, 0, -1);  // optical y = body down
  m.col(2) = Vec3(1, 0, 0);   // optical z = body forward
  return m;
}

void SyntheticScene::validate() const {
  if (!intrinsics.is_valid()) {
    throw Error(ErrorCode::kConfig, "scene intrinsics must be positive");
  }
  if (!(gt_scale > 0.0)) throw Error(ErrorCode::kConfig, "gt_scale must be positive");
  if (gt_trajectory.size() < 2) {
    throw Error(ErrorCode::kConfig, "gt trajectory needs at least 2 waypoints");
  }
  try {
    validate_waypoints(gt_trajectory);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("gt trajectory: ") + e.what());
  }
  const double t0 = gt_trajectory.front().t;
  const double t1 = gt_trajectory.back().t;
  for (int k = 0; k <= 1000; ++k) {
    const Vec3 p = pose_at(t0 + (t1 - t0) * k / 1000.0).position;
    if (has_ground && p.z() <= ground_height) {
      throw Error(ErrorCode::kConfig, "gt trajectory goes below ground");
    }
    for (const Box& b : obstacles) {
      if (inside_box(p, b)) {
        throw Error(ErrorCode::kConfig,
                    "gt trajectory enters obstacle '" + b.label + "'");
      }
    }
  }
}

Pose SyntheticScene::pose_at(double t) const {
  if (gt_trajectory.empty()) return {};
  const auto& w = gt_trajectory;
  if (t <= w.front().t) return Pose::from_yaw(w.front().position(), w.front().yaw);
  if (t >= w.back().t) return Pose::from_yaw(w.back().position(), w.back().yaw);
  size_t i = 0;
  while (i + 1 < w.size() && w[i + 1].t < t) ++i;
  const double f = (t - w[i].t) / (w[i + 1].t - w[i].t);
  const Vec3 p = w[i].position() + f * (w[i + 1].position() - w[i].position());
  const double yaw = wrap_angle(w[i].yaw + f * angle_diff(w[i + 1].yaw, w[i].yaw));
  return Pose::from_yaw(p, yaw);
}

SyntheticScene parse_scene(const std::string& json_text) {
  SyntheticScene scene;
  try {
    const auto j = nlohmann::json::parse(json_text);
    const auto& in = j.at("intrinsics");
    scene.intrinsics.fx = in.at("fx").get<double>();
    scene.intrinsics.fy = in.at("fy").get<double>();
    scene.intrinsics.cx = in.at("cx").get<double>();
    scene.intrinsics.cy = in.at("cy").get<double>();
    scene.intrinsics.width = in.at("width").get<int>();
    scene.intrinsics.height = in.at("height").get<int>();
    if (j.contains("ground")) {
      scene.has_ground = j["ground"].value("enabled", true);
      scene.ground_height = j["ground"].value("height", 0.0);
    }
    for (const auto& b : j.value("obstacles", nlohmann::json::array())) {
      Box box;
      box.label = b.value("label", "");
      box.min = json_vec3(b.at("min"));
      box.max = json_vec3(b.at("max"));
      scene.obstacles.push_back(box);
    }
    for (const auto& r : j.at("gt_trajectory")) {
      if (r.size() != 5) {
        throw Error(ErrorCode::kConfig, "gt waypoint must be [t, x, y, z, yaw]");
      }
      scene.gt_trajectory.push_back({r[0].get<double>(), r[1].get<double>(),
                                     r[2].get<double>(), r[3].get<double>(),
                                     r[4].get<double>()});
    }
    scene.gt_scale = j.value("gt_scale", 1.0);
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      scene.noise.depth_sigma = n.value("depth_sigma", 0.0);
      scene.noise.outlier_fraction = n.value("outlier_fraction", 0.0);
      if (n.contains("outlier_ratio")) {
        scene.noise.outlier_ratio_min = n["outlier_ratio"].at(0).get<double>();
        scene.noise.outlier_ratio_max = n["outlier_ratio"].at(1).get<double>();
      }
      scene.noise.seed = n.value("seed", std::uint64_t{1});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad scene file: ") + e.what());
  }
  scene.validate();
  return scene;
}

SyntheticScene load_scene(const std::filesystem::path& path) {
  return parse_scene(read_text_file(path));
}

std::string scene_to_json(const SyntheticScene& scene) {
  nlohmann::json j;
  const auto& in = scene.intrinsics;
  j["intrinsics"] = {{"fx", in.fx}, {"fy", in.fy}, {"cx", in.cx},
                     {"cy", in.cy}, {"width", in.width}, {"height", in.height}};
  j["ground"] = {{"enabled", scene.has_ground}, {"height", scene.ground_height}};
  j["obstacles"] = nlohmann::json::array();
  for (const Box& b : scene.obstacles) {
    j["obstacles"].push_back({{"label", b.label},
                              {"min", {b.min.x(), b.min.y(), b.min.z()}},
                              {"max", {b.max.x(), b.max.y(), b.max.z()}}});
  }
  j["gt_trajectory"] = nlohmann::json::array();
  for (const Waypoint& w : scene.gt_trajectory) {
    j["gt_trajectory"].push_back({w.t, w.x, w.y, w.z, w.yaw});
  }
  j["gt_scale"] = scene.gt_scale;
  j["noise"] = {{"depth_sigma", scene.noise.depth_sigma},
                {"outlier_fraction", scene.noise.outlier_fraction},
                {"outlier_ratio",
                 {scene.noise.outlier_ratio_min, scene.noise.outlier_ratio_max}},
                {"seed", scene.noise.seed}};
  return j.dump(2) + "\n";
}

GeometryFrame render_ground_truth(const SyntheticScene& scene, const Pose& pose,
                                  int width, int height) {
  const Intrinsics k =
      (width > 0 && height > 0) ? scene.intrinsics.resized(width, height)
                                : scene.intrinsics;
  if (!k.is_valid()) throw Error(ErrorCode::kArgument, "invalid intrinsics");
  if (!pose.is_valid(1e-6)) throw Error(ErrorCode::kArgument, "invalid pose");
  const Mat3 world_from_optical = pose.rotation * body_from_optical();
  const float inv_scale = static_cast<float>(1.0 / scene.gt_scale);
  GeometryFrame frame{DepthMap(k.width, k.height), PointMap(k.width, k.height)};
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 ray((u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0);
      const Hit hit = cast(scene, pose.position, world_from_optical * ray);
      if (hit.id < 0) continue;
      frame.depth.at(u, v) = static_cast<float>(hit.depth);
      frame.points.at(u, v) = (hit.depth * ray).cast<float>() * inv_scale;
    }
  }
  return frame;
}

std::vector<GeometryFrame> render_ground_truth(const SyntheticScene& scene,
                                               std::span<const Pose> poses,
                                               int width, int height) {
  std::vector<GeometryFrame> out;
  out.reserve(poses.size());
  for (const Pose& p : poses) out.push_back(render_ground_truth(scene, p, width, height));
  return out;
}

Image render_frame(const SyntheticScene& scene, const Pose& pose, int width,
                   int height, std::uint64_t seed) {
  static constexpr std::uint8_t kPalette[][3] = {
      {46, 139, 87},  {139, 69, 19},  {70, 130, 180}, {220, 220, 220},
      {178, 34, 34},  {255, 165, 0},  {106, 90, 205}, {30, 30, 30}};
  const Intrinsics k = scene.intrinsics.resized(width, height);
  const Mat3 world_from_optical = pose.rotation * body_from_optical();
  Image img(width, height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const Vec3 ray((u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0);
      const Vec3 dir = world_from_optical * ray;
      const Hit hit = cast(scene, pose.position, dir);
      std::uint8_t rgb[3];
      if (hit.id < 0) {
        rgb[0] = 150; rgb[1] = 190; rgb[2] = 235;
      } else if (hit.id == 0) {
        const Vec3 p = pose.position + hit.depth * dir;
        const bool checker =
            (static_cast<long>(std::floor(p.x())) + static_cast<long>(std::floor(p.y()))) & 1;
        rgb[0] = rgb[1] = rgb[2] = checker ? 110 : 140;
      } else {
        const auto& c = kPalette[(hit.id - 1) % 8];
        rgb[0] = c[0]; rgb[1] = c[1]; rgb[2] = c[2];
      }
      const std::uint64_t r = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(v) * width + u));
      std::uint8_t* px = img.pixel(u, v);
      for (int ch = 0; ch < 3; ++ch) {
        const int jitter = static_cast<int>((r >> (8 * ch)) % 5) - 2;
        px[ch] = static_cast<std::uint8_t>(std::clamp(rgb[ch] + jitter, 0, 255));
      }
    }
  }
  return img;
}

void apply_depth_noise(DepthMap& depth, const PointMap& points,
                       const NoiseSpec& noise, std::uint64_t stream) {
  if (depth.width != points.width || depth.height != points.height) {
    throw Error(ErrorCode::kShape, "noise: depth and pointmap sizes differ");
  }
  if (noise.depth_sigma <= 0.0 && noise.outlier_fraction <= 0.0) return;
  std::mt19937_64 rng(splitmix(noise.seed) ^ splitmix(stream + 0x51ED));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> ratio(noise.outlier_ratio_min,
                                               noise.outlier_ratio_max);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (size_t i = 0; i < depth.depth.size(); ++i) {
    const float d = depth.depth[i];
    const float z = points.points[i].z();
    if (!std::isfinite(d) || !(z > 0.0f)) continue;
    const double pick = unit(rng);
    const double g = gauss(rng);
    const double r = ratio(rng);
    if (pick < noise.outlier_fraction) {
      depth.depth[i] = static_cast<float>(r * z);
    } else {
      depth.depth[i] = static_cast<float>(std::max(0.0, d * (1.0 + noise.depth_sigma * g)));
    }
  }
}

OccupancyGrid voxelize(const SyntheticScene& scene, const Vec3& origin,
                       double resolution, std::array<int, 3> dims) {
  OccupancyGrid grid(origin, resolution, dims);
  for (const Box& b : scene.obstacles) grid.fill_box(b.min, b.max);
  if (scene.has_ground) {
    for (size_t i = 0; i < grid.cell_count(); ++i) {
      const GridIndex c = grid.unlinear(i);
      if (grid.center(c).z() < scene.ground_height) grid.set_occupied(c);
    }
  }
  return grid;
}

DroneState step(const DroneState& state, const Trajectory& trajectory, double dt,
                const TrackingConfig& config) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kArgument, "dt must be positive");
  const TrajectorySample now = trajectory.sample_at(state.t);
  const TrajectorySample next = trajectory.sample_at(state.t + dt);
  const double w = config.bandwidth;
  const Vec3 e0 = state.position - now.position;
  const Vec3 de0 = state.velocity - now.velocity;
  const double decay = std::exp(-w * dt);
  Vec3 e = (e0 + (de0 + w * e0) * dt) * decay;
  Vec3 de = (de0 - w * dt * (de0 + w * e0)) * decay;
  if (config.accel_noise > 0.0) {
    // Keyed by time so a replayed run draws the same gust.
    std::mt19937_64 rng(splitmix(config.seed) ^
                        splitmix(static_cast<std::uint64_t>(std::llround(state.t * 1e6))));
    std::normal_distribution<double> gauss(0.0, config.accel_noise);
    const Vec3 gust(gauss(rng), gauss(rng), gauss(rng));
    e += 0.5 * gust * dt * dt;
    de += gust * dt;
  }
  DroneState out;
  out.t = state.t + dt;
  out.position = next.position + e;
  out.velocity = next.velocity + de;
  out.yaw = wrap_angle(next.yaw);
  return out;
}

CollisionReport check_collisions(const Trajectory& trajectory,
                                 const OccupancyGrid& grid, double clearance) {
  CollisionReport report;
  const auto centers = grid.occupied_centers();
  if (centers.empty()) return report;
  for (size_t i = 0; i < trajectory.samples.size(); ++i) {
    const Vec3& p = trajectory.samples[i].position;
    double best = kInf;
    Vec3 nearest = Vec3::Zero();
    for (const Vec3& c : centers) {
      const double d = (c - p).norm();
      if (d < best) {
        best = d;
        nearest = c;
      }
    }
    if (best < clearance) {
      report.violations.push_back({i, trajectory.samples[i].t, p, nearest, best});
    }
  }
  return report;
}

ExecutionLog execute(const Trajectory& trajectory,
                     std::span<const Waypoint> waypoints,
                     const DroneState& start, const ExecutionConfig& config) {
  ExecutionLog log;
  WaypointQueue queue{WaypointSequence(waypoints.begin(), waypoints.end()), 0,
                      config.switch_threshold};
  DroneState state = start;
  log.states.push_back(state);
  auto watch = [&]() {
    if (queue.waypoints.empty() || queue.current_index >= queue.waypoints.size()) {
      return;
    }
    const size_t before = queue.current_index;
    std::vector<double> dist;
    for (size_t i = before; i < queue.waypoints.size(); ++i) {
      dist.push_back((queue.waypoints[i].position() - state.position).norm());
    }
    const TargetUpdate update = next_target(queue, state.position);
    for (size_t k = 0; k < update.reached; ++k) {
      log.events.push_back({state.t, before + k, dist[k]});
    }
  };
  watch();
  const double end = trajectory.duration() + config.settle_time;
  while (state.t < end - 1e-12) {
    state = step(state, trajectory, config.dt, config.tracking);
    log.states.push_back(state);
    const double err = (state.position - trajectory.sample_at(state.t).position).norm();
    log.max_tracking_error = std::max(log.max_tracking_error, err);
    watch();
    if (state.t >= trajectory.duration() && queue.current_index >= queue.waypoints.size()) {
      break;
    }
  }
  log.completed = queue.current_index >= queue.waypoints.size();
  return log;
}

std::string execution_log_to_text(const ExecutionLog& log) {
  nlohmann::json j;
  j["completed"] = log.completed;
  j["max_tracking_error"] = log.max_tracking_error;
  j["events"] = nlohmann::json::array();
  for (const auto& e : log.events) {
    j["events"].push_back({{"t", e.t}, {"index", e.index}, {"distance", e.distance}});
  }
  j["states"] = nlohmann::json::array();
  for (const auto& s : log.states) {
    j["states"].push_back({s.t, s.position.x(), s.position.y(), s.position.z(),
                           s.velocity.x(), s.velocity.y(), s.velocity.z(), s.yaw});
  }
  return j.dump() + "\n";
}

}  // namespace vidnav
