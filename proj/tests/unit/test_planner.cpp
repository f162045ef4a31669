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

#include <cmath>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "vidnav/error.hpp"
#include "vidnav/planner.hpp"
#include "vidnav/simulator.hpp"

namespace vidnav {
namespace {

TEST(Queue, Switching) {
  WaypointQueue q{{{0, 0.3, 0, 0, 0}, {1, 5, 0, 0, 0}}, 0, 0.5};
  auto u = next_target(q, Vec3::Zero());
  EXPECT_EQ(u.kind, TargetKind::kAdvanced);
  EXPECT_EQ(u.index, 1u);
  EXPECT_EQ(u.reached, 1u);

  WaypointQueue far{{{0, 1, 0, 0, 0}}, 0, 0.5};
  u = next_target(far, Vec3::Zero());
  EXPECT_EQ(u.kind, TargetKind::kTarget);
  EXPECT_EQ(u.index, 0u);

  u = next_target(q, Vec3(4.8, 0, 0));
  EXPECT_EQ(u.kind, TargetKind::kDone);
  EXPECT_FALSE(u.waypoint);

  WaypointQueue empty;
  EXPECT_THROW(next_target(empty, Vec3::Zero()), Error);
}

TEST(Grid, TextRoundTrip) {
  OccupancyGrid g(Vec3(-1, 0.5, 0), 0.25, {5, 4, 3});
  g.set_occupied({1, 2, 0});
  g.set_occupied({4, 3, 2});
  const auto back = parse_grid(write_grid(g));
  EXPECT_EQ(back.raw(), g.raw());
  EXPECT_EQ(back.dims(), g.dims());
  EXPECT_DOUBLE_EQ(back.origin().x(), -1.0);
  EXPECT_THROW(parse_grid("origin 0 0 0\nresolution 1\ndims 2 2 2\n3:0\n"), Error);
  EXPECT_THROW(parse_grid("dims 1 1 1\n1:0\n"), Error);
}

TEST(Grid, CellMath) {
  OccupancyGrid g(Vec3::Zero(), 0.5, {4, 4, 4});
  EXPECT_EQ(*g.cell_of(Vec3(0.6, 0.1, 1.99)), (GridIndex{1, 0, 3}));
  EXPECT_FALSE(g.cell_of(Vec3(2.0, 0, 0)));
  EXPECT_TRUE((g.center({1, 1, 1}) - Vec3(0.75, 0.75, 0.75)).norm() < 1e-12);
  g.set_occupied({0, 0, 0});
  EXPECT_NEAR(g.nearest_occupied(Vec3(0.25, 0.25, 1.25), 2.0), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(g.nearest_occupied(Vec3(0.25, 0.25, 1.25), 0.5)));
}

TEST(PlanSegment, EmptyGridIsStraight) {
  OccupancyGrid g(Vec3::Zero(), 0.5, {10, 10, 4});
  const auto path = plan_segment(g, Vec3(0.3, 0.3, 1), Vec3(4.6, 4.1, 1.2), 0.3);
  ASSERT_EQ(path.size(), 2u);
}

// Wall at x in [2, 2.5) with a 3-cell gap in y.
OccupancyGrid gap_wall() {
  OccupancyGrid g(Vec3::Zero(), 0.25, {20, 20, 1});
  for (int y = 0; y < 20; ++y) {
    if (y >= 12 && y <= 14) continue;
    for (int x = 8; x <= 9; ++x) g.set_occupied({x, y, 0});
  }
  return g;
}

TEST(PlanSegment, ThroughGapWithClearance) {
  const auto g = gap_wall();
  const Vec3 a(0.5, 0.6, 0.125), b(4.5, 0.6, 0.125);
  const double clearance = 0.3;
  const auto path = plan_segment(g, a, b, clearance);
  const auto occ = g.occupied_centers();
  bool through_gap = false;
  for (size_t i = 1; i < path.size(); ++i) {
    EXPECT_GE(oracle::segment_clearance(occ, path[i - 1], path[i]), clearance - 1e-9);
    // Crossing the wall plane inside the gap.
    const Vec3 p = path[i - 1], q = path[i];
    if ((p.x() - 2.25) * (q.x() - 2.25) <= 0 && p.x() != q.x()) {
      const double y = p.y() + (2.25 - p.x()) / (q.x() - p.x()) * (q.y() - p.y());
      through_gap = through_gap || (y >= 3.0 && y <= 3.75);
    }
  }
  EXPECT_TRUE(through_gap);
  const double best = oracle::shortest_inflated_path(g, a, b, clearance);
  ASSERT_TRUE(std::isfinite(best));
  EXPECT_LE(path_length(path), 1.05 * best);
}

TEST(PlanSegment, OccludedAndUnreachable) {
  auto g = gap_wall();
  try {
    plan_segment(g, Vec3(0.5, 0.5, 0.125), Vec3(2.1, 1.0, 0.125), 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGoalOccluded);
  }
  for (int y = 12; y <= 14; ++y) g.set_occupied({8, y, 0});
  try {
    plan_segment(g, Vec3(0.5, 0.5, 0.125), Vec3(4.5, 0.5, 0.125), 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnreachable);
  }
}

TEST(Timing, StraightTrapezoid) {
  std::vector<Vec3> path{Vec3::Zero(), Vec3(10, 0, 0)};
  const auto t = time_parameterize(path, {2.0, 1.0});
  EXPECT_NEAR(t.duration(), 7.0, 1e-9);
  EXPECT_NEAR(t.duration(), oracle::trapezoid_duration(10, 2, 1), 1e-9);
  EXPECT_FALSE(trajectory_violation(t, {2.0, 1.0}));
  // Accelerating phase covers 2 m in 2 s.
  EXPECT_NEAR(t.sample_at(2.0).position.x(), 2.0, 1e-9);
  EXPECT_NEAR(t.sample_at(5.0).position.x(), 8.0, 1e-9);
  EXPECT_NEAR(t.samples.back().position.x(), 10.0, 1e-12);
}

TEST(Timing, Triangle) {
  std::vector<Vec3> path{Vec3::Zero(), Vec3(1, 0, 0)};
  const auto t = time_parameterize(path, {2.0, 1.0});
  EXPECT_NEAR(t.duration(), 2.0, 1e-9);
  double peak = 0;
  for (const auto& s : t.samples) peak = std::max(peak, s.velocity.norm());
  EXPECT_NEAR(peak, 1.0, 1e-9);
}

TEST(Timing, HoverAndCorners) {
  std::vector<Vec3> one{Vec3(1, 2, 3), Vec3(1, 2, 3)};
  const auto h = time_parameterize(one, {1, 1});
  EXPECT_EQ(h.samples.size(), 1u);

  std::vector<Vec3> corner{Vec3::Zero(), Vec3(5, 0, 0), Vec3(5, 5, 0)};
  TimingConfig tc;
  tc.corner_clearance = 0.25;
  const auto t = time_parameterize(corner, {3.0, 1.0}, tc);
  EXPECT_FALSE(trajectory_violation(t, {3.0, 1.0}));
  ASSERT_EQ(t.knots.size(), 3u);
  EXPECT_LE(t.sample_at(t.knots[1]).velocity.norm(), std::sqrt(0.25) + 1e-6);
}

TEST(Yaw, RampThenHold) {
  std::vector<Waypoint> w{{0, 0, 0, 0, 0}, {1, 1, 0, 0, kPi / 2}};
  Trajectory base;
  for (int i = 0; i <= 40; ++i) base.samples.push_back({i * 0.05, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), 0});
  base.knots = {0.0, 1.0};
  const auto t = yaw_schedule(w, base, 2.0);
  // Reaches pi/2 at pi/4 s, then holds.
  EXPECT_NEAR(t.sample_at(0.5).yaw, 1.0, 1e-9);
  EXPECT_NEAR(t.sample_at(0.8).yaw, kPi / 2, 1e-9);
  EXPECT_NEAR(t.samples.back().yaw, kPi / 2, 1e-12);
  for (size_t i = 1; i < t.samples.size(); ++i)
    EXPECT_LE(std::abs(angle_diff(t.samples[i].yaw, t.samples[i - 1].yaw)), 2.0 * 0.05 + 1e-12);
}

TEST(Yaw, ConstantAndWraparound) {
  Trajectory base;
  for (int i = 0; i <= 20; ++i) base.samples.push_back({i * 0.1, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), 0});
  base.knots = {0.0, 2.0};
  std::vector<Waypoint> same{{0, 0, 0, 0, 0.7}, {1, 1, 0, 0, 0.7}};
  for (const auto& s : yaw_schedule(same, base, 1.0).samples) EXPECT_DOUBLE_EQ(s.yaw, 0.7);

  // +3.0 to -3.0 goes the short way through +-pi: 2*pi - 6 ~ 0.2832 rad.
  std::vector<Waypoint> wrap{{0, 0, 0, 0, 3.0}, {1, 1, 0, 0, -3.0}};
  const auto t = yaw_schedule(wrap, base, 1.0);
  EXPECT_NEAR(t.samples.back().yaw, -3.0, 1e-9);
  for (const auto& s : t.samples) EXPECT_GE(std::abs(s.yaw), 3.0 - 1e-9) << "passed through 0";
  EXPECT_NEAR(std::abs(angle_diff(-3.0, 3.0)), 0.2832, 1e-4);
}

TEST(PlanMission, GoldenSceneCollisionFree) {
  const auto& scene = *fixture::golden_scene();
  const Vec3 origin(-1.5, -4.5, 0.0);
  const double res = 0.25;
  auto grid = voxelize(scene, origin, res, {50, 50, 16});
  PlannerConfig pc;
  const auto plan = plan_mission(grid, scene.gt_trajectory, pc);
  EXPECT_TRUE(check_collisions(plan.trajectory, grid, pc.clearance).clear());
  EXPECT_FALSE(trajectory_violation(plan.trajectory, plan.limits));
  EXPECT_EQ(plan.trajectory.knots.size(), scene.gt_trajectory.size());
  EXPECT_THROW(plan_mission(grid, std::vector<Waypoint>{scene.gt_trajectory[0]}), Error);
}

}  // namespace
}  // namespace vidnav
