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
#include "vidnav/error.hpp"
#include "vidnav/planner.hpp"
#include "vidnav/simulator.hpp"

namespace vidnav {
namespace {

Trajectory line(double length, double vmax = 1.0) {
  std::vector<Vec3> path{Vec3::Zero(), Vec3(length, 0, 0)};
  return time_parameterize(path, {vmax, 1.0});
}

Trajectory hover(const Vec3& p) {
  Trajectory t;
  t.samples.push_back({0.0, p, Vec3::Zero(), Vec3::Zero(), 0});
  return t;
}

TEST(Step, OnTrajectoryStaysOn) {
  const auto t = line(5);
  DroneState s;
  for (int i = 0; i < 100; ++i) {
    s = step(s, t, 0.05);
    const auto ref = t.sample_at(s.t);
    EXPECT_LT((s.position - ref.position).norm(), 1e-9);
    EXPECT_LT((s.velocity - ref.velocity).norm(), 1e-9);
  }
}

TEST(Step, HoverConvergesMonotonically) {
  const Vec3 goal(1, 2, 3);
  const auto t = hover(goal);
  DroneState s;
  s.position = goal + Vec3(0.8, -0.5, 0.2);
  double prev = (s.position - goal).norm();
  for (int i = 0; i < 200; ++i) {
    s = step(s, t, 0.05);
    const double e = (s.position - goal).norm();
    EXPECT_LE(e, prev + 1e-12);
    prev = e;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Step, EndHoldsAndVelocityDecays) {
  const auto t = line(2);
  DroneState s;
  s.t = t.duration();
  s.position = Vec3(2, 0, 0);
  s.velocity = Vec3(0.5, 0, 0);
  double v = s.velocity.norm();
  for (int i = 0; i < 60; ++i) {
    s = step(s, t, 0.05);
    v = s.velocity.norm();
  }
  EXPECT_LT(v, 1e-2);
  EXPECT_NEAR(s.position.x(), 2.0, 0.2);
  EXPECT_THROW(step(s, t, 0.0), Error);
}

TEST(Collisions, EmptyGridAndNearMiss) {
  OccupancyGrid g(Vec3::Zero(), 0.5, {6, 6, 6});
  const auto t = hover(Vec3(1.25, 1.25, 1.05));
  EXPECT_TRUE(check_collisions(t, g, 0.3).clear());
  g.set_occupied({2, 2, 2});  // center (1.25, 1.25, 1.25): 0.2 m away
  const auto r = check_collisions(t, g, 0.3);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_NEAR(r.violations[0].distance, 0.2, 1e-12);
}

TEST(Render, DownwardCameraOverGround) {
  SyntheticScene scene;
  scene.intrinsics = {50, 50, 20, 15, 40, 30};
  scene.gt_scale = 2.0;
  Pose p;
  p.position = Vec3(0, 0, 1);
  p.rotation = Eigen::AngleAxisd(kPi / 2, Vec3::UnitY()).toRotationMatrix();
  ASSERT_NEAR(p.forward().z(), -1.0, 1e-12);
  const auto g = render_ground_truth(scene, p);
  for (int v = 0; v < 30; ++v)
    for (int u = 0; u < 40; ++u) {
      EXPECT_NEAR(g.depth.at(u, v), 1.0f, 1e-5f);
      EXPECT_NEAR(g.points.at(u, v).z(), 0.5f * g.depth.at(u, v), 1e-6f);
    }
}

TEST(Render, MissIsInvalid) {
  SyntheticScene scene;
  scene.has_ground = false;
  scene.intrinsics = {50, 50, 20, 15, 40, 30};
  const auto g = render_ground_truth(scene, Pose::from_yaw(Vec3(0, 0, 1), 0));
  EXPECT_TRUE(std::isinf(g.depth.at(10, 10)));
  EXPECT_EQ(g.points.at(10, 10), Eigen::Vector3f::Zero());
}

TEST(Render, ObstacleDepthAndScale) {
  SyntheticScene scene;
  scene.has_ground = false;
  scene.gt_scale = 2.0;
  scene.intrinsics = {50, 50, 20, 15, 40, 30};
  scene.obstacles.push_back({Vec3(4, -10, -10), Vec3(5, 10, 10), "wall"});
  const auto g = render_ground_truth(scene, Pose::from_yaw(Vec3(0, 0, 1), 0), 40, 30);
  // Principal ray hits the wall face at 4 m.
  EXPECT_NEAR(g.depth.at(20, 15), 4.0f, 1e-4f);
  EXPECT_NEAR(g.points.at(20, 15).z(), 2.0f, 1e-4f);
}

TEST(Render, NoiseIsSeeded) {
  const auto scene = fixture::golden_scene();
  auto a = render_ground_truth(*scene, scene->pose_at(1.0), 64, 48);
  auto b = a;
  apply_depth_noise(a.depth, a.points, scene->noise, 3);
  apply_depth_noise(b.depth, b.points, scene->noise, 3);
  EXPECT_EQ(a.depth.depth, b.depth.depth);
  auto c = render_ground_truth(*scene, scene->pose_at(1.0), 64, 48);
  apply_depth_noise(c.depth, c.points, scene->noise, 4);
  EXPECT_NE(a.depth.depth, c.depth.depth);
}

TEST(Scene, JsonRoundTripAndValidation) {
  const auto& scene = *fixture::golden_scene();
  EXPECT_NO_THROW(scene.validate());
  const auto back = parse_scene(scene_to_json(scene));
  EXPECT_EQ(back.obstacles.size(), scene.obstacles.size());
  EXPECT_DOUBLE_EQ(back.gt_scale, 2.17);
  EXPECT_EQ(back.gt_trajectory.size(), 5u);
  auto broken = scene;
  broken.gt_trajectory[1].set_position(Vec3(1.3, -2.2, 1.0));  // inside the column
  EXPECT_THROW(broken.validate(), Error);
  EXPECT_THROW(parse_scene("{"), Error);
}

TEST(Scene, PoseInterpolation) {
  const auto& scene = *fixture::golden_scene();
  const Pose p = scene.pose_at(1.25);
  EXPECT_NEAR(p.position.x(), 1.5, 1e-12);
  EXPECT_NEAR(scene.pose_at(-1).position.x(), 0.0, 1e-12);
  EXPECT_NEAR(yaw_from_pose(scene.pose_at(100)), 1.4, 1e-12);
}

TEST(Voxelize, ObstaclesBecomeOccupied) {
  const auto& scene = *fixture::golden_scene();
  const auto g = voxelize(scene, Vec3(0, -3, 0), 0.5, {10, 10, 4});
  // Column spans x [1, 1.6], y [-2.5, -1.9]: cell (2, 1, 0) has center (1.25, -2.25, .25).
  EXPECT_TRUE(g.occupied({2, 1, 0}));
  EXPECT_FALSE(g.occupied({0, 5, 2}));
}

TEST(Execute, GoldenWaypointsInOrder) {
  const auto& scene = *fixture::golden_scene();
  auto grid = voxelize(scene, Vec3(-1.5, -4.5, 0.0), 0.25, {50, 50, 16});
  const auto plan = plan_mission(grid, scene.gt_trajectory);
  DroneState start;
  start.position = scene.gt_trajectory.front().position();
  const auto log = execute(plan.trajectory, scene.gt_trajectory, start);
  EXPECT_TRUE(log.completed);
  ASSERT_EQ(log.events.size(), scene.gt_trajectory.size());
  for (size_t i = 0; i < log.events.size(); ++i) {
    EXPECT_EQ(log.events[i].index, i);
    EXPECT_LT(log.events[i].distance, 0.5);
  }
  EXPECT_LT(log.max_tracking_error, 1e-6);
  EXPECT_NE(execution_log_to_text(log).find("\"completed\":true"), std::string::npos);
}

}  // namespace
}  // namespace vidnav
