// Copyright 2026 The Stitchkit Authors
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

#ifndef STITCHKIT_ENVS_PRESETS_H_
#define STITCHKIT_ENVS_PRESETS_H_

#include <string>

#include "stitchkit/envs/planar_arm.h"

namespace stitchkit::envs {

struct EnvSpec {
  std::string id;
  RobotConfig robot;
  TaskConfig task;

  PlanarArmEnv Make() const { return PlanarArmEnv(robot, task); }
};

// Parses ids of the form
//   <task>-r<n>[-lock<j>[@<angle>]]...[-big][-q<quadrant>]
// with task in {reach, push1, push2}. Examples: "reach-r2", "push1-r3-lock1",
// "push2-r3-big", "reach-r2-q1". Throws ConfigError on unknown ids.
EnvSpec ParseEnvId(const std::string& id);

// Quadrant of the goal direction, 0..3 counter-clockwise from +x.
int GoalQuadrant(const Eigen::Vector2d& goal);

}  // namespace stitchkit::envs

#endif  // STITCHKIT_ENVS_PRESETS_H_
