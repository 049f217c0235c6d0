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

#include "stitchkit/envs/scripted_reach.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stitchkit/errors.h"

namespace stitchkit::envs {
namespace {

double Wrap(double angle) {
  return std::remainder(angle, 2.0 * std::numbers::pi);
}

}  // namespace

ScriptedReachPolicy::ScriptedReachPolicy(const RobotConfig& robot)
    : robot_(robot) {
  robot_.Validate();
  if (robot_.n_joints() != 2) {
    throw ConfigError("scripted reach oracle supports 2-link arms only");
  }
  if (!robot_.locked.empty()) {
    throw ConfigError("scripted reach oracle does not support locked joints");
  }
}

Eigen::VectorXd ScriptedReachPolicy::Act(const EnvState& state) const {
  const double l1 = robot_.link_lengths[0];
  const double l2 = robot_.link_lengths[1];
  const Eigen::Vector2d goal = state.task_state.tail<2>();
  const Eigen::VectorXd& q = state.robot_state;

  const double d2 = goal.squaredNorm();
  const double cos_elbow =
      std::clamp((d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double elbow = std::acos(cos_elbow);

  // Two elbow branches; pick the one needing the smaller joint excursion.
  Eigen::Vector2d best = Eigen::Vector2d::Zero();
  double best_cost = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    const double q2 = sign * elbow;
    const double q1 = Wrap(std::atan2(goal.y(), goal.x()) -
                           std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2)));
    const Eigen::Vector2d target(q1, q2);
    const double cost = (target - q.head<2>()).cwiseAbs().maxCoeff();
    if (cost < best_cost) {
      best_cost = cost;
      best = target;
    }
  }
  const Eigen::Vector2d delta = best - q.head<2>();
  return (delta / robot_.max_joint_velocity).cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace stitchkit::envs
