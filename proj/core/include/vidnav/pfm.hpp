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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vidnav/geometry.hpp"

namespace vidnav {

// Portable float maps. "Pf" holds one channel (depth), "PF" three
// (pointmaps). A negative scale field marks little-endian samples, rows are
// stored bottom-up. Writers always emit little-endian.

std::vector<std::uint8_t> encode_pfm(const DepthMap& depth);
std::vector<std::uint8_t> encode_pfm(const PointMap& points);

DepthMap decode_depth_pfm(const std::vector<std::uint8_t>& bytes);
PointMap decode_pointmap_pfm(const std::vector<std::uint8_t>& bytes);

void write_pfm(const std::filesystem::path& path, const DepthMap& depth);
void write_pfm(const std::filesystem::path& path, const PointMap& points);
DepthMap read_depth_pfm(const std::filesystem::path& path);
PointMap read_pointmap_pfm(const std::filesystem::path& path);

}  // namespace vidnav
