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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "stitchkit/envs/presets.h"
#include "stitchkit/envs/scripted_reach.h"
#include "stitchkit/errors.h"

namespace stitchkit::envs {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd Vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(ForwardKinematicsTest, TwoLinkExamples) {
  RobotConfig robot;
  EXPECT_TRUE(ForwardKinematics(robot, Vec({0, 0})).isApprox(Eigen::Vector2d(2, 0)));
  Eigen::Vector2d up = ForwardKinematics(robot, Vec({kPi / 2, 0}));
  EXPECT_NEAR(up.x(), 0.0, 1e-15);
  EXPECT_NEAR(up.y(), 2.0, 1e-15);
  Eigen::Vector2d elbow = ForwardKinematics(robot, Vec({kPi / 2, -kPi / 2}));
  EXPECT_NEAR(elbow.x(), 1.0, 1e-15);
  EXPECT_NEAR(elbow.y(), 1.0, 1e-15);
  EXPECT_THROW(ForwardKinematics(robot, Vec({0, 0, 0})), ShapeError);
}

TEST(RewardTest, StrictBoundary) {
  const Eigen::Vector2d g(0.3, -0.7);
  EXPECT_EQ(ComputeReward(g, g, 0.05), 0.0);
  EXPECT_EQ(ComputeReward(Eigen::Vector2d(0.3, -0.65), Eigen::Vector2d(0.3, -0.7), 0.05 + 1e-12), 0.0);
  // Exactly on the boundary counts as failure.
  EXPECT_EQ(ComputeReward(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.05, 0.0), 0.05), -1.0);
  EXPECT_EQ(ComputeReward(Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(0.0, 0.0), 0.05), -1.0);
}

TEST(ConfigTest, Validation) {
  RobotConfig robot;
  robot.locked = {{0, 0.0}, {1, 0.0}};
  EXPECT_THROW(robot.Validate(), ConfigError);
  robot.locked = {{0, 4.0}};
  EXPECT_THROW(robot.Validate(), ConfigError);
  robot.locked = {{2, 0.0}};
  EXPECT_THROW(robot.Validate(), ConfigError);

  TaskConfig task;
  task.goal_region.r_max = 2.5;
  EXPECT_THROW(PlanarArmEnv(RobotConfig{}, task), ConfigError);
  task = TaskConfig{};
  task.success_radius = 0.0;
  EXPECT_THROW(PlanarArmEnv(RobotConfig{}, task), ConfigError);
}

TEST(ResetTest, DeterministicPerSeed) {
  PlanarArmEnv a = ParseEnvId("push1-r3").Make();
  PlanarArmEnv b = ParseEnvId("push1-r3").Make();
  EnvState sa = a.Reset(42);
  EnvState sb = b.Reset(42);
  EXPECT_EQ(sa.task_state, sb.task_state);
  EXPECT_EQ(sa.robot_state, sb.robot_state);
  EnvState sc = b.Reset(43);
  EXPECT_NE(sa.task_state, sc.task_state);
}

TEST(ResetTest, LockedJointHeld) {
  EnvSpec spec = ParseEnvId("reach-r3-lock1@0.5");
  PlanarArmEnv env = spec.Make();
  for (uint64_t seed = 0; seed < 200; ++seed) {
    EXPECT_EQ(env.Reset(seed).robot_state(1), 0.5);
  }
}

TEST(ResetTest, GoalsInsideRegion) {
  for (const char* id : {"reach-r2", "push1-r2", "push2-r3-big", "push1-r3-lock1", "reach-r2-q2"}) {
    EnvSpec spec = ParseEnvId(id);
    PlanarArmEnv env = spec.Make();
    for (uint64_t seed = 0; seed < 10000; ++seed) {
      env.Reset(seed);
      ASSERT_TRUE(spec.task.goal_region.Contains(env.goal())) << id << " seed " << seed;
      if (spec.task.kind == TaskKind::kPush) {
        ASSERT_TRUE(spec.task.object_region.Contains(env.object()));
        const double d = (env.object() - env.end_effector()).norm();
        ASSERT_GT(d, spec.task.object_radius + spec.task.touch_radius);
        if (spec.task.max_object_offset > 0.0) {
          ASSERT_LE(d, spec.task.max_object_offset);
        }
      }
      for (int j = 0; j < env.robot_dim(); ++j) {
        ASSERT_LE(std::abs(env.angles()(j)), kJointLimit);
      }
    }
  }
}

TEST(ResetTest, ObjectOffsetLimitsStartDistance) {
  EnvSpec spec = ParseEnvId("push1-r3-lock1");
  spec.task.max_object_offset = 0.5;
  PlanarArmEnv env = spec.Make();
  for (uint64_t seed = 0; seed < 5000; ++seed) {
    env.Reset(seed);
    ASSERT_TRUE(spec.task.object_region.Contains(env.object()));
    const double d = (env.object() - env.end_effector()).norm();
    ASSERT_GT(d, spec.task.object_radius + spec.task.touch_radius);
    ASSERT_LE(d, 0.5);
  }
}

TEST(ResetTest, StateLayout) {
  PlanarArmEnv reach = ParseEnvId("reach-r2").Make();
  EnvState s = reach.Reset(1);
  ASSERT_EQ(s.task_state.size(), 2);
  EXPECT_EQ(s.task_state, reach.goal());
  EXPECT_EQ(s.robot_state.size(), 2);

  PlanarArmEnv push = ParseEnvId("push1-r3").Make();
  s = push.Reset(1);
  ASSERT_EQ(s.task_state.size(), 6);
  EXPECT_EQ(s.task_state.head<2>(), push.object());
  EXPECT_EQ(s.task_state.segment<2>(2), Eigen::Vector2d::Zero());
  EXPECT_EQ(s.task_state.tail<2>(), push.goal());
  EXPECT_EQ(s.robot_state.size(), 3);
}

TEST(StepTest, ZeroActionKeepsState) {
  PlanarArmEnv env = ParseEnvId("push1-r2").Make();
  EnvState s = env.Reset(7);
  StepOutcome out = env.Step(Eigen::VectorXd::Zero(2));
  EXPECT_EQ(out.next_state.robot_state, s.robot_state);
  EXPECT_EQ(out.next_state.task_state, s.task_state);
  EXPECT_EQ(out.reward, -1.0);
  EXPECT_FALSE(out.done);
}

TEST(StepTest, IntegratesAndClampsActions) {
  PlanarArmEnv env = ParseEnvId("reach-r2").Make();
  env.ResetTo(Vec({0.0, 3.1}), Eigen::Vector2d(0.0, 1.0));
  StepOutcome out = env.Step(Vec({5.0, 0.5}));
  EXPECT_NEAR(out.next_state.robot_state(0), 0.15, 1e-15);
  EXPECT_NEAR(out.next_state.robot_state(1), kJointLimit, 1e-15);
  EXPECT_THROW(env.Step(Vec({0.0})), ShapeError);
}

TEST(StepTest, LockedJointIgnoresAction) {
  PlanarArmEnv env = ParseEnvId("reach-r3-lock2@-0.3").Make();
  env.Reset(3);
  Rng rng(9);
  while (env.active()) {
    Eigen::VectorXd a(3);
    for (int i = 0; i < 3; ++i) a(i) = rng.Uniform(-1.0, 1.0);
    StepOutcome out = env.Step(a);
    ASSERT_EQ(out.next_state.robot_state(2), -0.3);
  }
}

TEST(StepTest, TimeoutAndInactive) {
  PlanarArmEnv env = ParseEnvId("reach-r2").Make();
  env.ResetTo(Vec({0.0, 0.0}), Eigen::Vector2d(-1.0, 0.0));
  StepOutcome out;
  for (int t = 0; t < 50; ++t) out = env.Step(Eigen::VectorXd::Zero(2));
  EXPECT_TRUE(out.done);
  EXPECT_FALSE(out.success);
  EXPECT_THROW(env.Step(Eigen::VectorXd::Zero(2)), UsageError);
}

TEST(StepTest, ReachSuccessEndsEpisode) {
  PlanarArmEnv env = ParseEnvId("reach-r2").Make();
  // The end-effector moves onto the goal in one step.
  const Eigen::Vector2d goal = ForwardKinematics(env.robot(), Vec({0.15, 0.0}));
  env.ResetTo(Vec({0.0, 0.0}), goal);
  StepOutcome out = env.Step(Vec({1.0, 0.0}));
  EXPECT_EQ(out.reward, 0.0);
  EXPECT_TRUE(out.success);
  EXPECT_TRUE(out.done);
  EXPECT_TRUE(out.touched);
}

TEST(PushTest, FrictionlessDisplacementEqualsPenetration) {
  EnvSpec spec = ParseEnvId("push1-r2");
  spec.task.slip = 0.0;
  PlanarArmEnv env = spec.Make();
  // Arm straight along +x, object centre just beyond the tip; rotating joint 0
  // sweeps the tip through the disk.
  const Eigen::Vector2d object(2.0, 0.0);
  env.ResetTo(Vec({0.0, -0.2}), Eigen::Vector2d(-1.0, -1.0), object);
  const Eigen::Vector2d before = env.object();
  StepOutcome out = env.Step(Vec({0.0, 1.0}));
  const Eigen::Vector2d moved = env.object() - before;
  EXPECT_GT(moved.norm(), 0.0);
  EXPECT_NEAR((env.object() - env.end_effector()).norm(),
              spec.task.object_radius, 1e-9);
  // Velocity equals the displacement over the step.
  EXPECT_TRUE(out.next_state.task_state.segment<2>(2).isApprox(moved));
}

TEST(PushTest, SingleSubstepFrictionless) {
  EnvSpec spec = ParseEnvId("push1-r2");
  spec.task.slip = 0.0;
  spec.task.contact_substeps = 1;
  PlanarArmEnv env = spec.Make();
  const Eigen::VectorXd start = Vec({0.0, -0.2});
  const Eigen::Vector2d object(2.0, 0.02);
  env.ResetTo(start, Eigen::Vector2d(-1.0, -1.0), object);
  const Eigen::Vector2d tip = ForwardKinematics(env.robot(), Vec({0.0, -0.05}));
  const double depth = spec.task.object_radius - (object - tip).norm();
  ASSERT_GT(depth, 0.0);
  env.Step(Vec({0.0, 1.0}));
  EXPECT_NEAR((env.object() - object).norm(), depth, 1e-12);
  // The displacement is along the contact normal.
  const Eigen::Vector2d normal = (object - tip).normalized();
  EXPECT_NEAR((env.object() - object).normalized().dot(normal), 1.0, 1e-12);
}

TEST(PushTest, SlipScalesDisplacement) {
  EnvSpec spec = ParseEnvId("push2-r2");
  spec.task.contact_substeps = 1;
  PlanarArmEnv env = spec.Make();
  const Eigen::Vector2d object(2.0, 0.02);
  env.ResetTo(Vec({0.0, -0.2}), Eigen::Vector2d(-1.0, -1.0), object);
  const Eigen::Vector2d tip = ForwardKinematics(env.robot(), Vec({0.0, -0.05}));
  const double depth = spec.task.object_radius - (object - tip).norm();
  env.Step(Vec({0.0, 1.0}));
  EXPECT_NEAR((env.object() - object).norm(), (1.0 - 0.7) * depth, 1e-12);
}

TEST(PushTest, NeverPenetrates) {
  for (const char* id : {"push1-r2", "push2-r3", "push1-r3-big"}) {
    PlanarArmEnv env = ParseEnvId(id).Make();
    Rng rng(11);
    int contacts = 0;
    for (uint64_t ep = 0; ep < 60; ++ep) {
      env.Reset(ep);
      // Drive towards the object with a noisy scripted push.
      while (env.active()) {
        Eigen::VectorXd a(env.action_dim());
        for (int i = 0; i < a.size(); ++i) a(i) = rng.Uniform(-1.0, 1.0);
        if (env.robot_dim() == 2) {
          const Eigen::Vector2d target = env.object();
          const double bearing = std::atan2(target.y(), target.x());
          a(0) = std::clamp(4.0 * std::remainder(bearing - env.angles()(0), 2 * kPi), -1.0, 1.0);
          a(1) = rng.Uniform(-1.0, 0.2);
        }
        StepOutcome out = env.Step(a);
        const double gap = (env.end_effector() - env.object()).norm() -
                           env.task().object_radius;
        ASSERT_GE(gap, -1e-9) << id;
        contacts += out.touched;
      }
    }
    EXPECT_GT(contacts, 0) << id;
  }
}

TEST(PushTest, AchievedGoalIsObject) {
  PlanarArmEnv env = ParseEnvId("push1-r2").Make();
  env.Reset(5);
  StepOutcome out = env.Step(Eigen::VectorXd::Zero(2));
  EXPECT_EQ(out.achieved_goal, env.object());
}

TEST(DeterminismTest, SeedAndActionsFixTrajectory) {
  auto run = [](uint64_t seed) {
    PlanarArmEnv env = ParseEnvId("push1-r3").Make();
    env.Reset(seed);
    Rng rng(seed);
    std::vector<double> trace;
    while (env.active()) {
      Eigen::VectorXd a(3);
      for (int i = 0; i < 3; ++i) a(i) = rng.Uniform(-1.0, 1.0);
      StepOutcome out = env.Step(a);
      for (int i = 0; i < 6; ++i) trace.push_back(out.next_state.task_state(i));
      trace.push_back(out.reward);
    }
    return trace;
  };
  EXPECT_EQ(run(17), run(17));
}

TEST(PresetTest, ParsesIds) {
  EnvSpec s = ParseEnvId("push1-r3-lock1");
  EXPECT_EQ(s.robot.n_joints(), 3);
  EXPECT_EQ(s.robot.locked.at(1), 0.0);
  EXPECT_DOUBLE_EQ(s.task.slip, 0.2);
  EXPECT_DOUBLE_EQ(ParseEnvId("push2-r2").task.slip, 0.7);
  EXPECT_DOUBLE_EQ(ParseEnvId("push2-r2-big").task.object_radius, 0.15);
  EXPECT_DOUBLE_EQ(ParseEnvId("push2-r2").task.object_radius, 0.08);
  for (const char* bad : {"", "reach", "fly-r2", "reach-r1", "reach-rx", "reach-r2-big",
                          "reach-r2-lock5", "reach-r2-lock0-lock1", "reach-r2-q4",
                          "reach-r2-extra"}) {
    EXPECT_THROW(ParseEnvId(bad), ConfigError) << bad;
  }
}

TEST(PresetTest, QuadrantRegions) {
  for (int q = 0; q < 4; ++q) {
    PlanarArmEnv env = ParseEnvId("reach-r2-q" + std::to_string(q)).Make();
    for (uint64_t seed = 0; seed < 200; ++seed) {
      env.Reset(seed);
      ASSERT_EQ(GoalQuadrant(env.goal()), q);
    }
  }
  EXPECT_EQ(GoalQuadrant(Eigen::Vector2d(1, 1)), 0);
  EXPECT_EQ(GoalQuadrant(Eigen::Vector2d(-1, 1)), 1);
  EXPECT_EQ(GoalQuadrant(Eigen::Vector2d(-1, -1)), 2);
  EXPECT_EQ(GoalQuadrant(Eigen::Vector2d(1, -1)), 3);
}

TEST(ScriptedReachTest, SolvesDefaultReach) {
  EnvSpec spec = ParseEnvId("reach-r2");
  PlanarArmEnv env = spec.Make();
  ScriptedReachPolicy policy(spec.robot);
  int successes = 0;
  for (uint64_t ep = 0; ep < 100; ++ep) {
    EnvState s = env.Reset(1000 + ep);
    StepOutcome out;
    while (env.active()) {
      out = env.Step(policy.Act(s));
      s = out.next_state;
    }
    successes += out.success;
  }
  EXPECT_GE(successes, 99);
}

TEST(ScriptedReachTest, GoalAtEndEffectorSucceedsInOneStep) {
  PlanarArmEnv env = ParseEnvId("reach-r2").Make();
  ScriptedReachPolicy policy(env.robot());
  const Eigen::VectorXd angles = Vec({0.4, 1.1});
  EnvState s = env.ResetTo(angles, ForwardKinematics(env.robot(), angles));
  StepOutcome out = env.Step(policy.Act(s));
  EXPECT_TRUE(out.success);
}

TEST(ScriptedReachTest, RejectsUnsupportedRobots) {
  EXPECT_THROW(ScriptedReachPolicy(ParseEnvId("reach-r3-lock1").robot), ConfigError);
  EXPECT_THROW(ScriptedReachPolicy(ParseEnvId("reach-r3").robot), ConfigError);
}

}  // namespace
}  // namespace stitchkit::envs
