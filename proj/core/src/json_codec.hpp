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


// JSON mappings shared by the persistence, config and service code.

#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "vidnav/error.hpp"
#include "vidnav/geometry.hpp"
#include "vidnav/judge.hpp"

namespace vidnav {

inline nlohmann::json to_json_value(const JudgeScores& s) {
  return {{"video", s.video}, {"pass", s.pass}, {"total", s.total}, {"tp", s.tp},
          {"as", s.as},       {"sc", s.sc},     {"reason", s.reason}};
}

inline JudgeScores judge_scores_from_json(const nlohmann::json& j) {
  JudgeScores s;
  s.video = j.at("video").get<int>();
  s.pass = j.at("pass").get<bool>();
  s.tp = j.at("tp").get<double>();
  s.as = j.at("as").get<double>();
  s.sc = j.at("sc").get<double>();
  s.total = j.value("total", reward(s));
  s.reason = j.value("reason", "");
  return s;
}

inline nlohmann::json to_json_value(const Waypoint& w) {
  return nlohmann::json::array({w.t, w.x, w.y, w.z, w.yaw});
}

inline Waypoint waypoint_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 5) {
    throw Error(ErrorCode::kParse, "waypoint must be [t, x, y, z, yaw]");
  }
  return Waypoint{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                  j[3].get<double>(), j[4].get<double>()};
}

// Rejects keys outside `allowed`.
inline void check_keys(const nlohmann::json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw Error(ErrorCode::kConfig, where + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw Error(ErrorCode::kConfig, "unknown key '" + where + "." + item.key() + "'");
  }
}

template <typename T>
void read_opt(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace vidnav
