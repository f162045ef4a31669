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

#include <filesystem>
#include <memory>

#include "vidnav/adapters.hpp"
#include "vidnav/config.hpp"
#include "vidnav/simulator.hpp"

namespace vidnav::fixture {

inline std::filesystem::path data_dir() { return VIDNAV_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return VIDNAV_TEST_DATA_DIR; }

inline std::shared_ptr<const SyntheticScene> golden_scene() {
  static const auto scene =
      std::make_shared<const SyntheticScene>(load_scene(data_dir() / "golden_scene.json"));
  return scene;
}

// Small frames keep the mocks cheap where image content does not matter.
inline MockOptions tiny() {
  MockOptions o;
  o.width = 32;
  o.height = 24;
  return o;
}

// Mock-backed config over the golden scene with cheap frames.
inline PipelineConfig mock_config(MockOptions options = tiny(), int k = 3) {
  PipelineConfig c;
  c.sampling.k = k;
  c.sampling.fps = 8;
  c.sampling.duration = 5;
  c.sampling.stride = 4;
  c.adapters.mock = true;
  c.adapters.mock_config.options = options;
  c.adapters.mock_config.pass_probability = 1.0;
  c.scale.min_valid_pixels = 20;
  c.scale.pixel_stride = 2;
  return c;
}

}  // namespace vidnav::fixture
