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

#include <memory>
#include <string>

#include "vidnav/config.hpp"
#include "vidnav/mission.hpp"

namespace vidnav {

// HTTP front end over a MissionRunner. Bodies are JSON except the frame
// endpoint, which serves PNG.
//
//   POST /missions                  {instruction, observation?: base64 PNG}
//   GET  /missions                  newest first
//   GET  /missions/{id}
//   GET  /missions/{id}/candidates  summaries plus downsampled frame indices
//   POST /missions/{id}/advance     runs one stage
//   POST /missions/{id}/decision    {action: resample|terminate|approve-override,
//                                    candidate?}
//   GET  /missions/{id}/candidates/{cid}/frames/{n}
//   GET  /missions/{id}/trajectory
//
// Errors come back as {error, message} with 400 (bad input), 404 (unknown
// mission or artifact), 409 (wrong mission state) or 500.
class MissionService {
 public:
  // `scene`, when given, supplies the start pose and a rendered observation
  // for missions created without one.
  MissionService(MissionRunner& runner, PipelineConfig config,
                 std::shared_ptr<const SyntheticScene> scene = nullptr);
  ~MissionService();

  // Returns the bound port; `port` 0 picks a free one.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vidnav
