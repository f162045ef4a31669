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

#include <span>
#include <string>
#include <vector>

#include "vidnav/geometry.hpp"

namespace vidnav {

enum class Consensus { kMedian, kMean };

struct ScaleConfig {
  double tau_min = 0.5;  // meters, exclusive
  double tau_max = 30.0;
  int min_valid_pixels = 100;
  int pixel_stride = 4;  // applied along both image axes
  // kMean exists only to reproduce the consensus ablation.
  Consensus consensus = Consensus::kMedian;

  // Throws kConfig on 0 < tau_min < tau_max, min_valid_pixels >= 1 or
  // pixel_stride >= 1 violations.
  void validate() const;
};

// Metric reference depth paired with the decoder's normalized pointmap.
struct GeometryFrame {
  DepthMap depth;
  PointMap points;
};

struct ScaleEstimate {
  double scale = 1.0;  // meters per normalized unit
  size_t valid_pixel_count = 0;
  std::vector<size_t> per_frame_counts;
  // NaN for frames that contributed no ratio.
  std::vector<double> per_frame_medians;
};

// Pixels with tau_min < depth < tau_max (finite) and predicted depth > 0.
PixelMask build_mask(const DepthMap& depth_ref, const PointMap& pointmap,
                     const ScaleConfig& config = {});

// depth / predicted depth over the masked pixels of one frame, strided.
std::vector<double> frame_ratios(const GeometryFrame& frame,
                                 const ScaleConfig& config);

// Lower median (the smaller middle element for even counts).
double lower_median(std::vector<double> values);

// Pools ratios across frames and reduces them to one global scale.
// Throws kScaleIndeterminate below min_valid_pixels pooled ratios.
ScaleEstimate estimate_scale(std::span<const GeometryFrame> frames,
                             const ScaleConfig& config = {});

// Multiplies positions by `scale`; time and yaw are untouched.
WaypointSequence apply_scale(double scale, std::span<const Waypoint> waypoints);

// Structured text record of an estimate.
std::string scale_report(const ScaleEstimate& estimate);
ScaleEstimate parse_scale_report(const std::string& text);

}  // namespace vidnav
