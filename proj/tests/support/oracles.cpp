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


#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <unistd.h>

namespace vidnav::oracle {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  // Dense sampling plus both endpoints, refined by the exact projection.
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = s < 0 ? 0 : (s > 1 ? 1 : s);
  return (p - (a + s * ab)).norm();
}
}  // namespace

double lower_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<int> argmax_pass(std::span<const JudgeScores> verdicts, double w_tp,
                               double w_as, double w_sc, double normalizer) {
  std::optional<int> best;
  double best_r = -kInf;
  // Visit in increasing video order so strict '>' keeps the lowest id on ties.
  std::vector<JudgeScores> sorted(verdicts.begin(), verdicts.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.video < b.video; });
  for (const auto& v : sorted) {
    if (!v.pass) continue;
    const double r = (w_tp * v.tp + w_as * v.as + w_sc * v.sc) / normalizer;
    if (r > best_r) {
      best_r = r;
      best = v.video;
    }
  }
  return best;
}

double segment_clearance(std::span<const Vec3> occupied, const Vec3& a, const Vec3& b) {
  double best = kInf;
  for (const Vec3& c : occupied) best = std::min(best, point_segment(c, a, b));
  return best;
}

double shortest_inflated_path(const OccupancyGrid& grid, const Vec3& start,
                              const Vec3& goal, double clearance) {
  const auto occ = grid.occupied_centers();
  auto clear = [&](const Vec3& a, const Vec3& b) {
    return segment_clearance(occ, a, b) >= clearance;
  };
  if (clear(start, goal)) return (goal - start).norm();

  const auto& d = grid.dims();
  const size_t n = grid.cell_count();
  std::vector<char> free(n, 0);
  for (size_t i = 0; i < n; ++i) {
    const Vec3 p = grid.center(grid.unlinear(i));
    free[i] = segment_clearance(occ, p, p) >= clearance;
  }
  // Node n = start, n + 1 = goal.
  std::vector<double> dist(n + 2, kInf);
  std::vector<char> done(n + 2, 0);
  auto pos = [&](size_t i) {
    return i == n ? start : (i == n + 1 ? goal : grid.center(grid.unlinear(i)));
  };
  auto near_cell = [&](size_t i, const Vec3& p) {
    const auto c = grid.cell_of(p);
    const GridIndex g = grid.unlinear(i);
    return c && std::abs(g.x - c->x) <= 1 && std::abs(g.y - c->y) <= 1 &&
           std::abs(g.z - c->z) <= 1;
  };
  std::set<std::pair<double, size_t>> open;
  dist[n] = 0.0;
  open.insert({0.0, n});
  while (!open.empty()) {
    const auto [du, u] = *open.begin();
    open.erase(open.begin());
    if (done[u]) continue;
    done[u] = 1;
    if (u == n + 1) return du;
    std::vector<size_t> next;
    if (u == n) {
      for (size_t i = 0; i < n; ++i)
        if (free[i] && near_cell(i, start)) next.push_back(i);
    } else {
      const GridIndex g = grid.unlinear(u);
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const GridIndex m{g.x + dx, g.y + dy, g.z + dz};
            if ((dx || dy || dz) && m.x >= 0 && m.y >= 0 && m.z >= 0 && m.x < d[0] &&
                m.y < d[1] && m.z < d[2] && free[grid.linear(m)])
              next.push_back(grid.linear(m));
          }
      if (near_cell(u, goal)) next.push_back(n + 1);
    }
    for (size_t v : next) {
      if (done[v] || !clear(pos(u), pos(v))) continue;
      const double alt = du + (pos(v) - pos(u)).norm();
      if (alt < dist[v]) {
        dist[v] = alt;
        open.insert({alt, v});
      }
    }
  }
  return kInf;
}

double trapezoid_duration(double length, double vmax, double amax) {
  if (length <= 0) return 0.0;
  // Triangle when the peak speed sqrt(L a) stays under vmax.
  if (length * amax <= vmax * vmax) return 2.0 * std::sqrt(length / amax);
  return length / vmax + vmax / amax;
}

double projection_yaw(const Mat3& rotation) {
  const Vec3 f = rotation * Vec3::UnitX();
  return std::atan2(f.y(), f.x());
}

std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("vidnav_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace vidnav::oracle
