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


// Brute-force reference implementations. They share no code with the
// library: each one is the slowest obviously-correct way to get the answer.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vidnav/geometry.hpp"
#include "vidnav/judge.hpp"
#include "vidnav/planner.hpp"

namespace vidnav::oracle {

// Full sort, lower middle element.
double lower_median(std::vector<double> values);

// Arithmetic mean.
double mean(std::span<const double> values);

// Linear scan over passing verdicts with an explicit reward expression.
std::optional<int> argmax_pass(std::span<const JudgeScores> verdicts, double w_tp,
                               double w_as, double w_sc, double normalizer);

// Minimum distance from segment [a, b] to every occupied center.
double segment_clearance(std::span<const Vec3> occupied, const Vec3& a, const Vec3& b);

// Dijkstra over every cell center at least `clearance` from all occupied
// centers, 26-connected, edges checked against all occupied centers. Start
// and goal link to any free center within one cell of their own cell, and to
// each other directly. +inf when unreachable.
double shortest_inflated_path(const OccupancyGrid& grid, const Vec3& start,
                              const Vec3& goal, double clearance);

// Rest-to-rest straight-line duration under (vmax, amax).
double trapezoid_duration(double length, double vmax, double amax);

// Yaw of the forward axis projected onto the horizontal plane.
double projection_yaw(const Mat3& rotation);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace vidnav::oracle
