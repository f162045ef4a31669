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
#include "vidnav/image.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>

#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

namespace vidnav {

std::uint64_t digest(const Image& image) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (int dim : {image.width, image.height}) {
    for (int i = 0; i < 4; ++i) mix(static_cast<std::uint8_t>(dim >> (8 * i)));
  }
  for (std::uint8_t b : image.rgb) mix(b);
  return h;
}

std::string digest_hex(const Image& image) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest(image)));
  return buf;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.empty() ||
      image.rgb.size() != static_cast<size_t>(image.width) * image.height * 3) {
    throw Error(ErrorCode::kArgument, "cannot encode an empty or torn image");
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.rgb.data(), 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIo, std::string("png sizing failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.rgb.data(),
                                 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("png encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (bytes.empty() ||
      !png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kInput, std::string("not a readable png image: ") +
                                       (bytes.empty() ? "empty" : png.message));
  }
  png.format = PNG_FORMAT_RGB;
  Image image(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, image.rgb.data(), 0, nullptr)) {
    png_image_free(&png);
    throw Error(ErrorCode::kInput, std::string("png decode failed: ") + png.message);
  }
  return image;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  write_file_atomic(path, encode_png(image));
}

Image read_png(const std::filesystem::path& path) {
  return decode_png(read_file_bytes(path));
}

}  // namespace vidnav
