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

#include "stitchkit/envs/presets.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "stitchkit/errors.h"

namespace stitchkit::envs {
namespace {

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(s);
  std::string part;
  while (std::getline(stream, part, sep)) {
    // A '-' right after '@' is the sign of a lock angle.
    if (!parts.empty() && !parts.back().empty() && parts.back().back() == '@') {
      parts.back() += sep + part;
    } else {
      parts.push_back(part);
    }
  }
  return parts;
}

bool ParseInt(const std::string& s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseDouble(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

[[noreturn]] void Unknown(const std::string& id, const std::string& why) {
  throw ConfigError("unknown environment id '" + id + "': " + why);
}

TaskConfig PushTask(double slip) {
  TaskConfig task;
  task.kind = TaskKind::kPush;
  task.slip = slip;
  task.object_radius = 0.08;
  task.object_region = Region{0.8, 1.4, -kJointLimit, kJointLimit};
  task.goal_region = Region{0.5, 1.7, -kJointLimit, kJointLimit};
  task.min_goal_offset = 0.1;
  task.max_goal_offset = 0.3;
  return task;
}

}  // namespace

EnvSpec ParseEnvId(const std::string& id) {
  const std::vector<std::string> parts = Split(id, '-');
  if (parts.size() < 2) Unknown(id, "expected <task>-r<n>");
  EnvSpec spec;
  spec.id = id;
  if (parts[0] == "reach") {
    spec.task = TaskConfig{};
  } else if (parts[0] == "push1") {
    spec.task = PushTask(0.2);
  } else if (parts[0] == "push2") {
    spec.task = PushTask(0.7);
  } else {
    Unknown(id, "task must be reach, push1 or push2");
  }
  int n_joints = 0;
  if (parts[1].size() < 2 || parts[1][0] != 'r' ||
      !ParseInt(parts[1].substr(1), n_joints) || n_joints < 2 || n_joints > 8) {
    Unknown(id, "robot token must be r<n> with 2 <= n <= 8");
  }
  spec.robot.link_lengths.assign(n_joints, 1.0);
  for (size_t i = 2; i < parts.size(); ++i) {
    const std::string& token = parts[i];
    if (token.rfind("lock", 0) == 0) {
      std::string body = token.substr(4);
      double angle = 0.0;
      const size_t at = body.find('@');
      if (at != std::string::npos) {
        if (!ParseDouble(body.substr(at + 1), angle)) {
          Unknown(id, "bad lock angle in '" + token + "'");
        }
        body = body.substr(0, at);
      }
      int joint = 0;
      if (!ParseInt(body, joint)) Unknown(id, "bad lock token '" + token + "'");
      spec.robot.locked[joint] = angle;
    } else if (token == "big") {
      if (spec.task.kind != TaskKind::kPush) Unknown(id, "'big' needs a push task");
      spec.task.object_radius = 0.15;
    } else if (token.size() == 2 && token[0] == 'q' && token[1] >= '0' &&
               token[1] <= '3') {
      const double quarter = std::numbers::pi / 2.0;
      const int q = token[1] - '0';
      // Quadrants 2 and 3 are expressed in (-pi, 0] to match atan2.
      const double start = q < 2 ? q * quarter : (q - 4) * quarter;
      spec.task.goal_region.angle_min = start + 1e-9;
      spec.task.goal_region.angle_max = start + quarter - 1e-9;
    } else {
      Unknown(id, "unrecognized token '" + token + "'");
    }
  }
  try {
    spec.robot.Validate();
    spec.task.Validate(spec.robot);
  } catch (const ConfigError& e) {
    Unknown(id, e.what());
  }
  return spec;
}

int GoalQuadrant(const Eigen::Vector2d& goal) {
  double angle = std::atan2(goal.y(), goal.x());
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  const int q = static_cast<int>(std::floor(angle / (std::numbers::pi / 2.0)));
  return std::clamp(q, 0, 3);
}

}  // namespace stitchkit::envs
