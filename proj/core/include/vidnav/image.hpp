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
#include <string>
#include <vector>

namespace vidnav {

// 8-bit RGB raster, row-major, top row first.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, 0) {}

  bool empty() const { return width <= 0 || height <= 0; }
  std::uint8_t* pixel(int u, int v) {
    return rgb.data() + (static_cast<size_t>(v) * width + u) * 3;
  }
  const std::uint8_t* pixel(int u, int v) const {
    return rgb.data() + (static_cast<size_t>(v) * width + u) * 3;
  }
};

// One frame of a video with its position in the source sequence.
struct Frame {
  Image image;
  int index = 0;   // index in the generated video
  double t = 0.0;  // seconds since the first frame
};

using FrameSequence = std::vector<Frame>;

// FNV-1a over dimensions and pixels.
std::uint64_t digest(const Image& image);
std::string digest_hex(const Image& image);

std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

}  // namespace vidnav
