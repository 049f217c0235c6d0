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

#ifndef STITCHKIT_ENVS_SCRIPTED_REACH_H_
#define STITCHKIT_ENVS_SCRIPTED_REACH_H_

#include <Eigen/Dense>

#include "stitchkit/envs/planar_arm.h"

namespace stitchkit::envs {

// Proportional joint-space controller towards a closed-form inverse
// kinematics solution. Only 2-link arms without locked joints are supported.
class ScriptedReachPolicy {
 public:
  explicit ScriptedReachPolicy(const RobotConfig& robot);

  Eigen::VectorXd Act(const EnvState& state) const;

 private:
  RobotConfig robot_;
};

}  // namespace stitchkit::envs

#endif  // STITCHKIT_ENVS_SCRIPTED_REACH_H_
