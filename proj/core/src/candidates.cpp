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


#include "vidnav/candidates.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "vidnav/adapters.hpp"
#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

namespace vidnav {
namespace {

using nlohmann::json;

std::string format_seconds(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void replace_all(std::string& text, std::string_view key, std::string_view value) {
  size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

std::string render(std::string text, const GenerationRequest& request) {
  replace_all(text, "{duration}", format_seconds(request.duration));
  replace_all(text, "{half_duration}", format_seconds(request.duration / 2.0));
  replace_all(text, "{instruction}", request.instruction);
  return text;
}

struct BuiltinRow {
  const char* family;
  const char* simple;
  const char* kinematic;
  const char* decomposed;
};

// Authored three-level prompts for the reference tasks, plus a generic
// fallback that splices the instruction in.
constexpr BuiltinRow kBuiltin[] = {
    {"circle_tree",
     "A first-person perspective video of a 360-degree circular orbit around a green "
     "tree centered in the frame.",
     "First-person perspective. The camera performs a smooth and steady 360-degree "
     "circular orbit around the green tree at a constant speed and fixed height, "
     "maintaining a strictly eye-level view without any vertical bobbing, tilting, or "
     "camera shake.",
     "First-person perspective. The camera performs a fast and steady 360-degree "
     "circular orbit around the green tree. The rotation completes a full 360-degree "
     "circle, ensuring the camera ends exactly back at the starting position and "
     "orientation. All environmental details, including the grey floor and patterned "
     "curtains, must remain perfectly consistent."},
    {"behind_rock",
     "A first-person perspective video circling around the large black rock to reach "
     "the area behind it.",
     "First-person perspective. The camera performs a smooth and steady circular "
     "movement to reach the rear of the large black rock, maintaining a constant "
     "eye-level view without any vertical bobbing or camera shake throughout the "
     "trajectory.",
     "First-person perspective. The camera performs a smooth, steady circular motion "
     "around the large black rock to reach its rear. Crucially, the camera's gaze "
     "remains fixed on the specific area behind the rock at all times. The entire "
     "indoor studio environment must remain perfectly consistent and static."},
    {"find_kitchen", "Move to the room where cooking is possible.",
     "First-person perspective. Perform a smooth and steady gliding motion at a "
     "constant height to enter the room where cooking is possible. The movement must "
     "be fluid with zero camera shake or erratic tilting.",
     "First-person perspective. Carefully analyze the visual landmarks and functional "
     "attributes of the two distinct spaces. Based on this semantic reasoning, execute "
     "a smooth transition into the specific area designed for food preparation while "
     "maintaining absolute environmental consistency."},
    {"fast_move",
     "First-person perspective video where the camera moves very fast toward the green "
     "tree in the distance and stops right in front of it.",
     "First-person perspective. The camera performs a smooth, high-speed forward "
     "movement toward the green tree, accelerating continuously to create a dynamic "
     "sense of depth, followed by a precise and stable stop directly in front of the "
     "tree.",
     "In the first 3 seconds, the camera rapidly moves forward toward the green tree, "
     "accelerating continuously to create motion blur on background elements. At the "
     "exact end of the third second, the camera comes to an immediate, precise stop at "
     "a one-meter distance. For the remaining 2 seconds, the camera remains completely "
     "stationary."},
    {"round_trip",
     "A first-person perspective video where the camera moves forward toward the green "
     "plants and then moves backward to the starting position.",
     "First-person perspective. The camera moves smoothly forward toward the plants "
     "along the center axis. At the midpoint of the path, the camera comes to a "
     "complete stop, then pulls back at the same constant speed until it returns to "
     "the start.",
     "The camera approaches the plants from the center axis, in a first-person "
     "perspective. When it reaches the midpoint, the camera stops. Then, the camera "
     "pulls back at the same speed, retracing the original path completely. The last "
     "frame of the video is exactly the same as the first frame."},
    {"turn_and_advance",
     "A first-person perspective video where the camera turns 45 degrees to the right "
     "and then moves straight forward across the open studio.",
     "First-person perspective. The camera performs a smooth 45-degree right turn, "
     "followed by a steady and fluid forward movement. The transition from rotation to "
     "translation must be seamless, maintaining constant height without unintended "
     "rotation.",
     "In the first 1 second, the camera smoothly rotates 45 degrees to the right. "
     "Immediately after finishing the rotation, it moves straight forward across the "
     "studio without any further rotation. All environmental "
     "details—including overhead lights and rigging—must remain perfectly "
     "consistent and static."},
    {"generic",
     "A first-person perspective drone video. {instruction}",
     "First-person perspective. {instruction} The camera moves smoothly and steadily "
     "at a constant height and speed, without vertical bobbing, tilting, or camera "
     "shake.",
     "First-person perspective. {instruction} In the first {half_duration} seconds, "
     "the camera starts the motion and steers toward the goal. In the remaining "
     "{half_duration} seconds, it completes the motion and comes to a precise, stable "
     "stop by the end of second {duration}. The environment must remain perfectly "
     "consistent and static throughout."},
};

json manifest_json(const CandidateVideo& video, const GenerationRequest& request) {
  json digests = json::array();
  for (const Image& f : video.frames) digests.push_back(digest_hex(f));
  return json{{"id", video.id},
              {"seed", video.seed},
              {"fps", video.fps},
              {"frame_count", video.frames.size()},
              {"prompt", request.prompt},
              {"prompt_level", std::string(to_string(request.prompt_level))},
              {"task_family", request.task_family},
              {"instruction", request.instruction},
              {"status", std::string(to_string(video.status))},
              {"note", video.note},
              {"digests", digests}};
}

}  // namespace

std::string_view to_string(PromptLevel level) {
  switch (level) {
    case PromptLevel::kSimple: return "simple";
    case PromptLevel::kKinematic: return "kinematic";
    case PromptLevel::kDecomposed: return "decomposed";
    case PromptLevel::kRewritten: return "rewritten";
  }
  return "unknown";
}

PromptLevel parse_prompt_level(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (n == "simple") return PromptLevel::kSimple;
  if (n == "kinematic" || n == "refined") return PromptLevel::kKinematic;
  if (n == "decomposed" || n == "detailed") return PromptLevel::kDecomposed;
  if (n == "rewritten") return PromptLevel::kRewritten;
  throw Error(ErrorCode::kConfig, "unknown prompt level '" + std::string(name) + "'");
}

void GenerationRequest::validate() const {
  if (instruction.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kArgument, "instruction must not be empty");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorCode::kArgument, "duration must be positive");
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw Error(ErrorCode::kArgument, "fps must be positive");
  }
}

int GenerationRequest::frame_count() const {
  return static_cast<int>(std::lround(duration * fps)) + 1;
}

std::string_view to_string(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::kUnjudged: return "unjudged";
    case CandidateStatus::kPass: return "pass";
    case CandidateStatus::kFail: return "fail";
  }
  return "unknown";
}

CandidateStatus parse_candidate_status(std::string_view name) {
  if (name == "unjudged") return CandidateStatus::kUnjudged;
  if (name == "pass") return CandidateStatus::kPass;
  if (name == "fail") return CandidateStatus::kFail;
  throw Error(ErrorCode::kParse, "unknown candidate status '" + std::string(name) + "'");
}

PromptTemplates PromptTemplates::builtin() {
  PromptTemplates t;
  for (const BuiltinRow& row : kBuiltin) {
    t.set(row.family, PromptLevel::kSimple, row.simple);
    t.set(row.family, PromptLevel::kKinematic, row.kinematic);
    t.set(row.family, PromptLevel::kDecomposed, row.decomposed);
  }
  return t;
}

PromptTemplates PromptTemplates::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("prompt templates: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "prompt templates must be an object");
  PromptTemplates t;
  for (const auto& [family, levels] : doc.items()) {
    if (!levels.is_object()) {
      throw Error(ErrorCode::kConfig, "templates for '" + family + "' must be an object");
    }
    for (const auto& [level, body] : levels.items()) {
      if (!body.is_string()) {
        throw Error(ErrorCode::kConfig, "template " + family + "/" + level + " must be text");
      }
      t.set(family, parse_prompt_level(level), body.get<std::string>());
    }
  }
  return t;
}

void PromptTemplates::set(std::string_view family, PromptLevel level, std::string text) {
  const std::string key = normalize_family(family);
  if (key.empty()) throw Error(ErrorCode::kConfig, "empty task family key");
  if (level == PromptLevel::kRewritten) {
    throw Error(ErrorCode::kConfig, "the rewritten level comes from a rewriter, not a template");
  }
  table_[key][level] = std::move(text);
}

const std::string* PromptTemplates::find(std::string_view family, PromptLevel level) const {
  auto it = table_.find(normalize_family(family));
  if (it == table_.end()) return nullptr;
  auto jt = it->second.find(level);
  return jt == it->second.end() ? nullptr : &jt->second;
}

std::vector<std::string> PromptTemplates::families() const {
  std::vector<std::string> out;
  for (const auto& entry : table_) out.push_back(entry.first);
  return out;
}

std::string normalize_family(std::string_view key) {
  std::string out;
  bool gap = false;
  for (unsigned char c : key) {
    if (std::isalnum(c)) {
      if (gap && !out.empty()) out += '_';
      out += static_cast<char>(std::tolower(c));
      gap = false;
    } else {
      gap = true;
    }
  }
  return out;
}

std::string build_prompt(const GenerationRequest& request,
                         const PromptTemplates& templates, PromptRewriter* rewriter) {
  request.validate();
  const std::string family = normalize_family(request.task_family);
  if (family.empty()) throw Error(ErrorCode::kConfig, "empty task family key");
  const PromptLevel base_level = request.prompt_level == PromptLevel::kRewritten
                                     ? PromptLevel::kSimple
                                     : request.prompt_level;
  const std::string* body = templates.find(family, base_level);
  if (!body) {
    throw Error(ErrorCode::kConfig, "no " + std::string(to_string(base_level)) +
                                        " template for task family '" + family + "'");
  }
  std::string prompt = render(*body, request);
  if (request.prompt_level == PromptLevel::kRewritten) {
    if (!rewriter) {
      throw Error(ErrorCode::kConfig, "rewritten prompts need a prompt rewriter");
    }
    prompt = rewriter->rewrite(prompt, request.instruction);
  }
  return prompt;
}

std::vector<CandidateVideo> sample_candidates(const GenerationRequest& request, int k,
                                              VideoGenClient& backend, int parallelism) {
  if (k < 1) throw Error(ErrorCode::kArgument, "K must be at least 1");
  if (parallelism < 1) throw Error(ErrorCode::kArgument, "parallelism must be at least 1");
  request.validate();

  std::vector<CandidateVideo> out(static_cast<size_t>(k));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < k; i = next++) {
      GenerationRequest r = request;
      r.seed = request.seed + i + 1;
      CandidateVideo& slot = out[static_cast<size_t>(i)];
      try {
        slot = backend.generate(r);
        if (slot.frames.empty()) {
          throw Error(ErrorCode::kInput, "backend returned no frames");
        }
      } catch (const std::exception& e) {
        slot = CandidateVideo{};
        slot.status = CandidateStatus::kFail;
        slot.note = e.what();
      }
      slot.id = i + 1;
      slot.seed = r.seed;
      if (slot.fps <= 0.0) slot.fps = request.fps;
    }
  };
  const int threads = std::min(parallelism, k);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (std::all_of(out.begin(), out.end(),
                  [](const CandidateVideo& c) { return c.frames.empty(); })) {
    throw Error(ErrorCode::kTransport, "every candidate generation failed; first error: " +
                                           out.front().note);
  }
  return out;
}

std::vector<int> downsample_indices(int frame_count, int stride) {
  if (stride < 1) throw Error(ErrorCode::kArgument, "stride must be at least 1");
  if (frame_count < 1) throw Error(ErrorCode::kArgument, "cannot downsample an empty video");
  std::vector<int> out;
  for (int i = 0; i < frame_count; i += stride) out.push_back(i);
  if (out.back() != frame_count - 1) out.push_back(frame_count - 1);
  return out;
}

FrameSequence downsample_frames(const CandidateVideo& video, int stride) {
  const auto indices = downsample_indices(static_cast<int>(video.frames.size()), stride);
  if (!(video.fps > 0.0)) throw Error(ErrorCode::kArgument, "video fps must be positive");
  FrameSequence out;
  out.reserve(indices.size());
  for (int i : indices) {
    out.push_back(Frame{video.frames[static_cast<size_t>(i)], i, i / video.fps});
  }
  return out;
}

std::string frame_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.png", index);
  return buf;
}

void save_candidate(const std::filesystem::path& dir, const CandidateVideo& video,
                    const GenerationRequest& request) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < video.frames.size(); ++i) {
    write_png(dir / frame_filename(static_cast<int>(i)), video.frames[i]);
  }
  write_file_atomic(dir / "manifest.json", manifest_json(video, request).dump(2));
}

CandidateVideo load_candidate(const std::filesystem::path& dir, bool with_frames) {
  CandidateVideo v;
  int n = 0;
  try {
    const json m = json::parse(read_text_file(dir / "manifest.json"));
    v.id = m.at("id").get<int>();
    v.seed = m.at("seed").get<std::int64_t>();
    v.fps = m.at("fps").get<double>();
    v.status = parse_candidate_status(m.at("status").get<std::string>());
    v.note = m.value("note", "");
    n = m.at("frame_count").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, (dir / "manifest.json").string() + ": " + e.what());
  }
  if (with_frames) {
    v.frames.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v.frames.push_back(read_png(dir / frame_filename(i)));
  }
  return v;
}

void set_candidate_status(const std::filesystem::path& dir, CandidateStatus status,
                          const std::string& note) {
  json m = json::parse(read_text_file(dir / "manifest.json"));
  m["status"] = std::string(to_string(status));
  if (!note.empty()) m["note"] = note;
  write_file_atomic(dir / "manifest.json", m.dump(2));
}

}  // namespace vidnav
