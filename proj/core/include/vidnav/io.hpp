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
#include <string_view>
#include <vector>

namespace vidnav {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary, flushes it to disk, then renames over
// `path`. Readers see either the old or the new content, never a torn file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);
void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& contents);

// Replaces directory `target` with the fully populated `staging` directory.
void replace_directory(const std::filesystem::path& staging,
                       const std::filesystem::path& target);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace vidnav
