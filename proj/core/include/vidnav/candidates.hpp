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
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vidnav/image.hpp"

namespace vidnav {

class VideoGenClient;
class PromptRewriter;

enum class PromptLevel { kSimple, kKinematic, kDecomposed, kRewritten };

std::string_view to_string(PromptLevel level);
// Accepts the canonical names plus "refined"/"detailed" aliases.
PromptLevel parse_prompt_level(std::string_view name);

struct GenerationRequest {
  std::shared_ptr<const Image> image;  // observation the video starts from
  std::string instruction;
  std::string task_family = "generic";  // prompt template key
  PromptLevel prompt_level = PromptLevel::kDecomposed;
  std::string prompt;  // resolved text sent to the backend
  std::int64_t seed = 0;
  double duration = 5.0;  // seconds
  double fps = 16.0;

  // Throws kArgument on empty instruction or non-positive duration/fps.
  void validate() const;
  // Frames spanning [0, duration] inclusive.
  int frame_count() const;
};

enum class CandidateStatus { kUnjudged, kPass, kFail };

std::string_view to_string(CandidateStatus status);
CandidateStatus parse_candidate_status(std::string_view name);

struct CandidateVideo {
  int id = 0;  // 1-based within a batch
  std::int64_t seed = 0;
  double fps = 16.0;
  std::vector<Image> frames;
  CandidateStatus status = CandidateStatus::kUnjudged;
  std::string note;  // backend error text for failed generations
};

// Prompt templates keyed by task family, three authored levels each. The
// rewritten level is produced from the simple prompt by a PromptRewriter.
// Templates may reference {instruction}, {duration} and {half_duration}.
class PromptTemplates {
 public:
  static PromptTemplates builtin();
  // {"family": {"simple": "...", "kinematic": "...", "decomposed": "..."}}
  static PromptTemplates from_json(const std::string& text);

  void set(std::string_view family, PromptLevel level, std::string text);
  const std::string* find(std::string_view family, PromptLevel level) const;
  std::vector<std::string> families() const;

 private:
  std::map<std::string, std::map<PromptLevel, std::string>, std::less<>> table_;
};

// "Circle Tree" -> "circle_tree".
std::string normalize_family(std::string_view key);

std::string build_prompt(const GenerationRequest& request,
                         const PromptTemplates& templates,
                         PromptRewriter* rewriter = nullptr);

// Issues K requests with seeds seed+1..seed+K, at most `parallelism` in
// flight. A failing request yields a kFail candidate carrying the error;
// the batch throws only when every request fails.
std::vector<CandidateVideo> sample_candidates(const GenerationRequest& request,
                                              int k, VideoGenClient& backend,
                                              int parallelism = 4);

// 0, stride, 2*stride, ... plus the final index when not already present.
std::vector<int> downsample_indices(int frame_count, int stride);
FrameSequence downsample_frames(const CandidateVideo& video, int stride);

// Candidate directory: frame_000000.png ... plus manifest.json.
void save_candidate(const std::filesystem::path& dir,
                    const CandidateVideo& video,
                    const GenerationRequest& request);
CandidateVideo load_candidate(const std::filesystem::path& dir,
                              bool with_frames = true);
// Rewrites the manifest's status and note in place.
void set_candidate_status(const std::filesystem::path& dir, CandidateStatus status,
                          const std::string& note = {});
std::string frame_filename(int index);

}  // namespace vidnav
