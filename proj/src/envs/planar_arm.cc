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

#include "stitchkit/envs/planar_arm.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "stitchkit/errors.h"

namespace stitchkit::envs {
namespace {

constexpr int kMaxRejections = 100000;
constexpr int kObjectTriesPerPose = 200;

Eigen::Vector2d SampleRegion(const Region& region, Rng& rng) {
  // Area-uniform radius.
  const double r2 = rng.Uniform(region.r_min * region.r_min,
                                region.r_max * region.r_max);
  const double angle = rng.Uniform(region.angle_min, region.angle_max);
  const double r = std::sqrt(r2);
  return {r * std::cos(angle), r * std::sin(angle)};
}

}  // namespace

double RobotConfig::reach() const {
  double total = 0.0;
  for (double l : link_lengths) total += l;
  return total;
}

void RobotConfig::Validate() const {
  if (n_joints() < 2) throw ConfigError("robot needs at least 2 joints");
  for (double l : link_lengths) {
    if (!(l > 0.0)) throw ConfigError("link lengths must be positive");
  }
  if (static_cast<int>(locked.size()) >= n_joints()) {
    throw ConfigError("at least one joint must remain unlocked");
  }
  for (const auto& [joint, angle] : locked) {
    if (joint < 0 || joint >= n_joints()) {
      throw ConfigError("locked joint index " + std::to_string(joint) +
                        " out of range");
    }
    if (angle < -kJointLimit || angle > kJointLimit) {
      throw ConfigError("locked joint angle outside [-pi, pi]");
    }
  }
  if (!(max_joint_velocity > 0.0)) {
    throw ConfigError("max_joint_velocity must be positive");
  }
}

bool Region::Contains(const Eigen::Vector2d& p, double tol) const {
  const double r = p.norm();
  if (r < r_min - tol || r > r_max + tol) return false;
  if (angle_max - angle_min >= 2.0 * kJointLimit - 1e-12) return true;
  const double angle = std::atan2(p.y(), p.x());
  return angle >= angle_min - tol && angle <= angle_max + tol;
}

void TaskConfig::Validate(const RobotConfig& robot) const {
  auto check_region = [&](const Region& region, const char* name) {
    if (!(region.r_min >= 0.0 && region.r_max > region.r_min)) {
      throw ConfigError(std::string(name) + ": need 0 <= r_min < r_max");
    }
    if (!(region.angle_max > region.angle_min)) {
      throw ConfigError(std::string(name) + ": empty angular span");
    }
    if (region.r_max >= robot.reach()) {
      throw ConfigError(std::string(name) + " lies outside the arm's reach");
    }
  };
  check_region(goal_region, "goal region");
  if (!(success_radius > 0.0)) throw ConfigError("success_radius must be > 0");
  if (touch_radius < 0.0) throw ConfigError("touch_radius must be >= 0");
  if (episode_length <= 0) throw ConfigError("episode_length must be > 0");
  if (kind == TaskKind::kPush) {
    check_region(object_region, "object region");
    if (!(object_radius > 0.0)) throw ConfigError("object_radius must be > 0");
    if (!(slip >= 0.0 && slip < 1.0)) {
      throw ConfigError("slip coefficient must lie in [0, 1)");
    }
    if (contact_substeps <= 0) throw ConfigError("contact_substeps must be > 0");
    if (max_goal_offset > 0.0 && max_goal_offset <= min_goal_offset) {
      throw ConfigError("max_goal_offset must exceed min_goal_offset");
    }
    if (max_object_offset < 0.0 ||
        (max_object_offset > 0.0 && max_object_offset <= object_radius + touch_radius)) {
      throw ConfigError("max_object_offset must be 0 or exceed the contact distance");
    }
  }
}

Eigen::Vector2d ForwardKinematics(const RobotConfig& robot,
                                  const Eigen::VectorXd& angles) {
  if (angles.size() != robot.n_joints()) {
    throw ShapeError("forward kinematics: expected " +
                     std::to_string(robot.n_joints()) + " angles");
  }
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  double theta = 0.0;
  for (int i = 0; i < robot.n_joints(); ++i) {
    theta += angles(i);
    p.x() += robot.link_lengths[i] * std::cos(theta);
    p.y() += robot.link_lengths[i] * std::sin(theta);
  }
  return p;
}

double ComputeReward(const Eigen::Vector2d& achieved,
                     const Eigen::Vector2d& goal, double success_radius) {
  return (achieved - goal).norm() < success_radius ? 0.0 : -1.0;
}

int TaskStateDim(TaskKind kind) { return kind == TaskKind::kReach ? 2 : 6; }

PlanarArmEnv::PlanarArmEnv(RobotConfig robot, TaskConfig task)
    : robot_(std::move(robot)), task_(std::move(task)) {
  robot_.Validate();
  task_.Validate(robot_);
  angles_ = Eigen::VectorXd::Zero(robot_.n_joints());
  for (const auto& [joint, angle] : robot_.locked) angles_(joint) = angle;
}

EnvState PlanarArmEnv::Reset(uint64_t seed) {
  Rng rng(MixSeed(seed, 0x5e7));
  auto sample_pose = [&] {
    for (int i = 0; i < robot_.n_joints(); ++i) {
      auto it = robot_.locked.find(i);
      angles_(i) = it != robot_.locked.end()
                       ? it->second
                       : rng.Uniform(-kJointLimit, kJointLimit);
    }
  };
  sample_pose();
  object_velocity_.setZero();
  steps_ = 0;
  active_ = true;
  int tries = 0;
  if (task_.kind == TaskKind::kReach) {
    const Eigen::Vector2d ee = end_effector();
    do {
      if (++tries > kMaxRejections) throw ConfigError("cannot sample a goal");
      goal_ = SampleRegion(task_.goal_region, rng);
    } while ((goal_ - ee).norm() < task_.success_radius);
    object_.setZero();
    return state();
  }
  const double clearance = task_.object_radius + task_.touch_radius;
  const double limit = task_.max_object_offset;
  int pose_tries = 0;
  while (true) {
    if (++tries > kMaxRejections) throw ConfigError("cannot sample an object");
    if (limit > 0.0 && ++pose_tries > kObjectTriesPerPose) {
      sample_pose();
      pose_tries = 0;
    }
    object_ = SampleRegion(task_.object_region, rng);
    const double d = (object_ - end_effector()).norm();
    if (d > clearance && (limit <= 0.0 || d <= limit)) break;
  }
  tries = 0;
  while (true) {
    if (++tries > kMaxRejections) throw ConfigError("cannot sample a goal");
    goal_ = SampleRegion(task_.goal_region, rng);
    const double offset = (goal_ - object_).norm();
    if (offset < task_.success_radius) continue;
    if (task_.max_goal_offset > 0.0 &&
        (offset > task_.max_goal_offset || offset < task_.min_goal_offset)) {
      continue;
    }
    break;
  }
  return state();
}

EnvState PlanarArmEnv::ResetTo(const Eigen::VectorXd& angles,
                               const Eigen::Vector2d& goal,
                               const Eigen::Vector2d& object) {
  if (angles.size() != robot_.n_joints()) {
    throw ShapeError("reset: angle vector has wrong length");
  }
  angles_ = angles.cwiseMax(-kJointLimit).cwiseMin(kJointLimit);
  for (const auto& [joint, angle] : robot_.locked) angles_(joint) = angle;
  goal_ = goal;
  object_ = object;
  object_velocity_.setZero();
  steps_ = 0;
  active_ = true;
  return state();
}

EnvState PlanarArmEnv::state() const {
  EnvState s;
  s.robot_state = angles_;
  s.task_state.resize(task_dim());
  if (task_.kind == TaskKind::kReach) {
    s.task_state << goal_.x(), goal_.y();
  } else {
    s.task_state << object_.x(), object_.y(), object_velocity_.x(),
        object_velocity_.y(), goal_.x(), goal_.y();
  }
  return s;
}

Eigen::Vector2d PlanarArmEnv::end_effector() const {
  return ForwardKinematics(robot_, angles_);
}

Eigen::Vector2d PlanarArmEnv::achieved_goal() const {
  return task_.kind == TaskKind::kReach ? end_effector() : object_;
}

bool PlanarArmEnv::Touching() const {
  if (task_.kind == TaskKind::kReach) {
    return (end_effector() - goal_).norm() <= task_.touch_radius;
  }
  return (end_effector() - object_).norm() <=
         task_.object_radius + task_.touch_radius;
}

// Quasi-static push. Each substep moves the joints by a fraction of the
// commanded delta; if the end-effector point ends inside the object disk the
// object is displaced along the contact normal by (1 - slip) * penetration and
// the arm is held back on the new object boundary.
void PlanarArmEnv::ResolveContact(const Eigen::VectorXd& start_angles) {
  const double radius = task_.object_radius;
  const int substeps = task_.contact_substeps;
  const Eigen::VectorXd delta = (angles_ - start_angles) / substeps;
  Eigen::VectorXd current = start_angles;
  for (int s = 0; s < substeps; ++s) {
    const Eigen::VectorXd from = current;
    const Eigen::VectorXd to = from + delta;
    const Eigen::Vector2d ee = ForwardKinematics(robot_, to);
    const Eigen::Vector2d offset = object_ - ee;
    const double distance = offset.norm();
    if (distance >= radius) {
      current = to;
      continue;
    }
    Eigen::Vector2d normal;
    if (distance > 0.0) {
      normal = offset / distance;
    } else {
      const Eigen::Vector2d motion = ee - ForwardKinematics(robot_, from);
      normal = motion.norm() > 0.0 ? Eigen::Vector2d(motion.normalized())
                                   : Eigen::Vector2d(1.0, 0.0);
    }
    object_ += (1.0 - task_.slip) * (radius - distance) * normal;
    // Hold the arm at the largest fraction of this substep that stays clear.
    auto clear = [&](double t) {
      return (ForwardKinematics(robot_, from + t * delta) - object_).norm() >=
             radius;
    };
    if (clear(1.0)) {
      current = to;
    } else if (clear(0.0)) {
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clear(mid) ? lo : hi) = mid;
      }
      current = from + lo * delta;
    } else {
      current = from;
    }
  }
  angles_ = current;
  // Guarantee non-penetration against round-off in the bisection.
  const Eigen::Vector2d ee = end_effector();
  const Eigen::Vector2d offset = object_ - ee;
  if (offset.norm() < radius) {
    const Eigen::Vector2d normal = offset.norm() > 0.0
                                       ? Eigen::Vector2d(offset.normalized())
                                       : Eigen::Vector2d(1.0, 0.0);
    object_ = ee + radius * normal;
  }
}

StepOutcome PlanarArmEnv::Step(const Eigen::VectorXd& action) {
  if (!active_) throw UsageError("step on an inactive episode; call Reset");
  if (action.size() != action_dim()) {
    throw ShapeError("action has length " + std::to_string(action.size()) +
                     ", expected " + std::to_string(action_dim()));
  }
  const Eigen::VectorXd start = angles_;
  const Eigen::Vector2d object_start = object_;
  for (int i = 0; i < robot_.n_joints(); ++i) {
    if (robot_.locked.count(i) != 0) continue;
    const double a = std::clamp(action(i), -1.0, 1.0);
    angles_(i) = std::clamp(angles_(i) + a * robot_.max_joint_velocity,
                            -kJointLimit, kJointLimit);
  }
  if (task_.kind == TaskKind::kPush) {
    ResolveContact(start);
    object_velocity_ = object_ - object_start;
  }
  ++steps_;

  StepOutcome out;
  out.achieved_goal = achieved_goal();
  out.reward = ComputeReward(out.achieved_goal, goal_, task_.success_radius);
  out.success = out.reward == 0.0;
  out.touched = Touching();
  out.done = out.success || steps_ >= task_.episode_length;
  out.next_state = state();
  if (out.done) active_ = false;
  return out;
}

}  // namespace stitchkit::envs
