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
#include "vidnav/pfm.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <sstream>
#include <string>

#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

namespace vidnav {
namespace {

struct Header {
  int channels = 0;
  int width = 0;
  int height = 0;
  bool little_endian = true;
  size_t data_offset = 0;
};

Header parse_header(const std::vector<std::uint8_t>& bytes) {
  // Three whitespace-terminated tokens after the magic; the byte following
  // the scale token is the single separator before raster data.
  size_t pos = 0;
  auto next_token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    const size_t start = pos;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
    if (start == pos) throw Error(ErrorCode::kInput, "truncated pfm header");
    return std::string(bytes.begin() + start, bytes.begin() + pos);
  };
  Header h;
  const std::string magic = next_token();
  if (magic == "Pf") {
    h.channels = 1;
  } else if (magic == "PF") {
    h.channels = 3;
  } else {
    throw Error(ErrorCode::kInput, "not a pfm file (magic '" + magic + "')");
  }
  try {
    h.width = std::stoi(next_token());
    h.height = std::stoi(next_token());
    const double scale = std::stod(next_token());
    if (scale == 0.0) throw Error(ErrorCode::kInput, "pfm scale field is zero");
    h.little_endian = scale < 0.0;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInput, "malformed pfm header");
  }
  if (h.width <= 0 || h.height <= 0) {
    throw Error(ErrorCode::kInput, "pfm dimensions must be positive");
  }
  h.data_offset = pos + 1;
  const size_t need = static_cast<size_t>(h.width) * h.height * h.channels * 4;
  if (bytes.size() < h.data_offset + need) {
    throw Error(ErrorCode::kInput, "pfm raster truncated");
  }
  return h;
}

float load_float(const std::uint8_t* p, bool little_endian) {
  std::uint32_t bits;
  if (little_endian) {
    bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
           std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
  } else {
    bits = std::uint32_t(p[3]) | std::uint32_t(p[2]) << 8 |
           std::uint32_t(p[1]) << 16 | std::uint32_t(p[0]) << 24;
  }
  return std::bit_cast<float>(bits);
}

void store_float(std::vector<std::uint8_t>& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  out.push_back(static_cast<std::uint8_t>(bits));
  out.push_back(static_cast<std::uint8_t>(bits >> 8));
  out.push_back(static_cast<std::uint8_t>(bits >> 16));
  out.push_back(static_cast<std::uint8_t>(bits >> 24));
}

std::vector<std::uint8_t> header_bytes(const char* magic, int w, int h) {
  std::ostringstream s;
  s << magic << '\n' << w << ' ' << h << "\n-1.0\n";
  const std::string text = s.str();
  return {text.begin(), text.end()};
}

}  // namespace

std::vector<std::uint8_t> encode_pfm(const DepthMap& depth) {
  auto out = header_bytes("Pf", depth.width, depth.height);
  out.reserve(out.size() + depth.depth.size() * 4);
  for (int v = depth.height - 1; v >= 0; --v) {
    for (int u = 0; u < depth.width; ++u) store_float(out, depth.at(u, v));
  }
  return out;
}

std::vector<std::uint8_t> encode_pfm(const PointMap& points) {
  auto out = header_bytes("PF", points.width, points.height);
  out.reserve(out.size() + points.points.size() * 12);
  for (int v = points.height - 1; v >= 0; --v) {
    for (int u = 0; u < points.width; ++u) {
      const auto& p = points.at(u, v);
      store_float(out, p.x());
      store_float(out, p.y());
      store_float(out, p.z());
    }
  }
  return out;
}

DepthMap decode_depth_pfm(const std::vector<std::uint8_t>& bytes) {
  const Header h = parse_header(bytes);
  if (h.channels != 1) {
    throw Error(ErrorCode::kShape, "expected a 1-channel Pf depth map");
  }
  DepthMap depth(h.width, h.height);
  const std::uint8_t* p = bytes.data() + h.data_offset;
  for (int v = h.height - 1; v >= 0; --v) {
    for (int u = 0; u < h.width; ++u, p += 4) {
      depth.at(u, v) = load_float(p, h.little_endian);
    }
  }
  return depth;
}

PointMap decode_pointmap_pfm(const std::vector<std::uint8_t>& bytes) {
  const Header h = parse_header(bytes);
  if (h.channels != 3) {
    throw Error(ErrorCode::kShape, "expected a 3-channel PF pointmap");
  }
  PointMap points(h.width, h.height);
  const std::uint8_t* p = bytes.data() + h.data_offset;
  for (int v = h.height - 1; v >= 0; --v) {
    for (int u = 0; u < h.width; ++u, p += 12) {
      points.at(u, v) = {load_float(p, h.little_endian),
                         load_float(p + 4, h.little_endian),
                         load_float(p + 8, h.little_endian)};
    }
  }
  return points;
}

void write_pfm(const std::filesystem::path& path, const DepthMap& depth) {
  write_file_atomic(path, encode_pfm(depth));
}

void write_pfm(const std::filesystem::path& path, const PointMap& points) {
  write_file_atomic(path, encode_pfm(points));
}

DepthMap read_depth_pfm(const std::filesystem::path& path) {
  return decode_depth_pfm(read_file_bytes(path));
}

PointMap read_pointmap_pfm(const std::filesystem::path& path) {
  return decode_pointmap_pfm(read_file_bytes(path));
}

}  // namespace vidnav
