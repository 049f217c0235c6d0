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

#ifndef STITCHKIT_ENVS_PLANAR_ARM_H_
#define STITCHKIT_ENVS_PLANAR_ARM_H_

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "stitchkit/nn/random.h"

namespace stitchkit::envs {

inline constexpr double kJointLimit = 3.14159265358979323846;

struct RobotConfig {
  std::vector<double> link_lengths = {1.0, 1.0};
  // joint index -> fixed angle
  std::map<int, double> locked;
  double max_joint_velocity = 0.15;  // rad per step at |action| = 1

  int n_joints() const { return static_cast<int>(link_lengths.size()); }
  double reach() const;
  void Validate() const;
};

// Annulus sector around the arm base.
struct Region {
  double r_min = 0.4;
  double r_max = 1.6;
  double angle_min = -kJointLimit;
  double angle_max = kJointLimit;

  bool Contains(const Eigen::Vector2d& p, double tol = 1e-12) const;
};

enum class TaskKind { kReach, kPush };

struct TaskConfig {
  TaskKind kind = TaskKind::kReach;
  Region goal_region;
  // Push only.
  double object_radius = 0.08;
  double slip = 0.2;
  Region object_region;
  // Push goals are additionally kept within this distance of the object start.
  double max_goal_offset = 0.0;
  double min_goal_offset = 0.0;
  // When positive, the object starts within this distance of the initial
  // end effector (the arm pose is redrawn until that is possible).
  double max_object_offset = 0.0;

  double success_radius = 0.05;
  double touch_radius = 0.02;
  int episode_length = 50;
  int contact_substeps = 10;

  void Validate(const RobotConfig& robot) const;
};

struct EnvState {
  // reach: goal(2); push: object(2), object velocity(2), goal(2).
  Eigen::VectorXd task_state;
  // Joint angles, locked joints included.
  Eigen::VectorXd robot_state;
};

struct StepOutcome {
  EnvState next_state;
  double reward = -1.0;
  bool done = false;
  bool success = false;
  bool touched = false;
  Eigen::Vector2d achieved_goal = Eigen::Vector2d::Zero();
};

Eigen::Vector2d ForwardKinematics(const RobotConfig& robot,
                                  const Eigen::VectorXd& angles);

// 0 iff ||achieved - goal|| < success_radius (strict), else -1.
double ComputeReward(const Eigen::Vector2d& achieved,
                     const Eigen::Vector2d& goal, double success_radius);

int TaskStateDim(TaskKind kind);
// Goal occupies the last two entries of the task state for every task kind.
inline constexpr int kGoalDim = 2;

class PlanarArmEnv {
 public:
  PlanarArmEnv(RobotConfig robot, TaskConfig task);

  EnvState Reset(uint64_t seed);
  StepOutcome Step(const Eigen::VectorXd& action);

  // Starts an episode from explicit values; used by scripted tests.
  EnvState ResetTo(const Eigen::VectorXd& angles, const Eigen::Vector2d& goal,
                   const Eigen::Vector2d& object = Eigen::Vector2d::Zero());

  const RobotConfig& robot() const { return robot_; }
  const TaskConfig& task() const { return task_; }
  int task_dim() const { return TaskStateDim(task_.kind); }
  int robot_dim() const { return robot_.n_joints(); }
  int action_dim() const { return robot_.n_joints(); }

  EnvState state() const;
  const Eigen::VectorXd& angles() const { return angles_; }
  Eigen::Vector2d end_effector() const;
  const Eigen::Vector2d& goal() const { return goal_; }
  const Eigen::Vector2d& object() const { return object_; }
  Eigen::Vector2d achieved_goal() const;
  int steps() const { return steps_; }
  bool active() const { return active_; }

 private:
  void ResolveContact(const Eigen::VectorXd& start_angles);
  bool Touching() const;

  RobotConfig robot_;
  TaskConfig task_;
  Eigen::VectorXd angles_;
  Eigen::Vector2d goal_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d object_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d object_velocity_ = Eigen::Vector2d::Zero();
  int steps_ = 0;
  bool active_ = false;
};

}  // namespace stitchkit::envs

#endif  // STITCHKIT_ENVS_PLANAR_ARM_H_
