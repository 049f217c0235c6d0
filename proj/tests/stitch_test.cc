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

#include <algorithm>
#include <memory>

#include <gtest/gtest.h>

#include "stitchkit/errors.h"
#include "stitchkit/policy/relative_representation.h"
#include "stitchkit/stitch/stitch.h"

namespace stitchkit::stitch {
namespace {

std::shared_ptr<const policy::AnchorSet> Anchors(int k, int d, double phase = 0.0) {
  Eigen::MatrixXd a(d, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < d; ++i) a(i, j) = std::sin(1.0 + phase + 0.7 * j + 1.3 * i);
  }
  return std::make_shared<policy::AnchorSet>(a);
}

io::Checkpoint Make(policy::Method method, uint64_t seed, const std::string& env_id = "push1-r3",
                    std::shared_ptr<const policy::AnchorSet> anchors = nullptr) {
  const envs::EnvSpec env = envs::ParseEnvId(env_id);
  const int dt = envs::TaskStateDim(env.task.kind);
  const int n = env.robot.n_joints();
  policy::ArchitectureConfig arch;
  arch.method = method;
  if (method == policy::Method::kPs && anchors == nullptr) anchors = Anchors(16, dt);
  rl::SacAgent agent = rl::SacAgent::Create(arch, {dt, n, n}, anchors, {}, seed);
  agent.set_log_alpha(-0.5 - static_cast<double>(seed));
  return io::FromAgent(agent, {{"env_id", env_id}, {"method", policy::MethodName(method)}});
}

Eigen::VectorXd AllParams(const policy::SplitNetwork& net) {
  Eigen::VectorXd t = net.task_module().Flatten();
  Eigen::VectorXd r = net.robot_module().Flatten();
  Eigen::VectorXd out(t.size() + r.size());
  out << t, r;
  return out;
}

TEST(StitchTest, SelfStitchIsBitIdentical) {
  for (policy::Method m : {policy::Method::kPs, policy::Method::kAblation,
                           policy::Method::kDevin, policy::Method::kPlain}) {
    io::Checkpoint c = Make(m, 3);
    policy::Actor stitched = StitchActor(c, c);
    Eigen::MatrixXd t = Eigen::MatrixXd::Random(6, 9);
    Eigen::MatrixXd r = Eigen::MatrixXd::Random(3, 9);
    EXPECT_EQ(stitched.DeterministicAction(t, r), c.actor.DeterministicAction(t, r));
    auto [q1, q2] = StitchCritics(c, c);
    EXPECT_EQ(q1.Forward(t, r, r), c.q1.Forward(t, r, r));
    EXPECT_EQ(q2.Forward(t, r, r), c.q2.Forward(t, r, r));
    // The whole stitched checkpoint matches apart from its metadata.
    io::Checkpoint s = Stitch(c, c, envs::ParseEnvId("push1-r3"));
    s.metadata = c.metadata;
    EXPECT_EQ(io::CheckpointHash(s), io::CheckpointHash(c));
  }
}

TEST(StitchTest, ActorEqualsManualComposition) {
  auto anchors = Anchors(16, 6);
  io::Checkpoint a = Make(policy::Method::kPs, 1, "push1-r3", anchors);
  io::Checkpoint b = Make(policy::Method::kPs, 2, "push2-r3-lock1", anchors);
  policy::Actor stitched = StitchActor(a, b);
  Eigen::MatrixXd t = Eigen::MatrixXd::Random(6, 5);
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(3, 5);
  // f_b(relrep(g_a(s_T), g_a(anchors)), s_R), module by module.
  const nn::Mlp& g = a.actor.network().task_module();
  const nn::Mlp& f = b.actor.network().robot_module();
  Eigen::MatrixXd rel = policy::RelativeRepresentation(g.Forward(t), g.Forward(anchors->states()),
                                                       true);
  Eigen::MatrixXd in(rel.rows() + 3, 5);
  in << rel, r;
  Eigen::MatrixXd out = f.Forward(in);
  policy::GaussianHead head = stitched.Forward(t, r);
  EXPECT_LT((head.mean - out.topRows(3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StitchTest, CriticEqualsManualComposition) {
  io::Checkpoint a = Make(policy::Method::kAblation, 1);
  io::Checkpoint b = Make(policy::Method::kAblation, 2);
  auto [q1, q2] = StitchCritics(a, b);
  Eigen::MatrixXd t = Eigen::MatrixXd::Random(6, 4);
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(3, 4);
  Eigen::MatrixXd act = Eigen::MatrixXd::Random(3, 4);
  Eigen::MatrixXd in(16 + 6, 4);
  in << a.q2.network().task_module().Forward(t), r, act;
  EXPECT_LT((q2.Forward(t, r, act) - b.q2.network().robot_module().Forward(in)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(StitchTest, PlainStitchSwapsHalves) {
  io::Checkpoint a = Make(policy::Method::kPlain, 1);
  io::Checkpoint b = Make(policy::Method::kPlain, 2);
  policy::Actor s = StitchActor(a, b);
  Eigen::MatrixXd t = Eigen::MatrixXd::Random(6, 4);
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(3, 4);
  Eigen::MatrixXd x(9, 4);
  x << t, r;
  Eigen::MatrixXd expected =
      b.actor.network().robot_module().Forward(a.actor.network().task_module().Forward(x));
  EXPECT_LT((s.Forward(t, r).mean - expected.topRows(3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StitchTest, IsPureRecombination) {
  io::Checkpoint a = Make(policy::Method::kPs, 1);
  io::Checkpoint b = Make(policy::Method::kPs, 2);
  const Eigen::VectorXd a_before = AllParams(a.actor.network());
  const Eigen::VectorXd b_before = AllParams(b.actor.network());
  policy::Actor s = StitchActor(a, b);
  EXPECT_EQ(s.network().task_module().Flatten(), a.actor.network().task_module().Flatten());
  EXPECT_EQ(s.network().robot_module().Flatten(), b.actor.network().robot_module().Flatten());
  // Multiset of stitched parameters == union of the donated modules.
  const Eigen::VectorXd stitched = AllParams(s.network());
  std::vector<double> got(stitched.data(), stitched.data() + stitched.size());
  Eigen::VectorXd donated_t = a.actor.network().task_module().Flatten();
  Eigen::VectorXd donated_r = b.actor.network().robot_module().Flatten();
  std::vector<double> want(donated_t.data(), donated_t.data() + donated_t.size());
  want.insert(want.end(), donated_r.data(), donated_r.data() + donated_r.size());
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
  EXPECT_EQ(AllParams(a.actor.network()), a_before);
  EXPECT_EQ(AllParams(b.actor.network()), b_before);
}

TEST(StitchTest, RejectsMismatchedAnchorSets) {
  io::Checkpoint a = Make(policy::Method::kPs, 1, "push1-r3", Anchors(16, 6, 0.0));
  io::Checkpoint b = Make(policy::Method::kPs, 2, "push1-r3", Anchors(16, 6, 0.5));
  EXPECT_THROW(StitchActor(a, b), IncompatibleError);
  EXPECT_THROW(Stitch(a, b, envs::ParseEnvId("push1-r3")), IncompatibleError);
}

TEST(StitchTest, RejectsMixedArchitectures) {
  EXPECT_THROW(StitchActor(Make(policy::Method::kPs, 1), Make(policy::Method::kAblation, 2)),
               IncompatibleError);
  EXPECT_THROW(StitchActor(Make(policy::Method::kPlain, 1), Make(policy::Method::kAblation, 2)),
               IncompatibleError);
  // Devin's bottleneck is narrower than the ablation interface.
  EXPECT_THROW(StitchActor(Make(policy::Method::kDevin, 1), Make(policy::Method::kAblation, 2)),
               ShapeError);
}

TEST(StitchTest, ChecksTargetDimensions) {
  io::Checkpoint a = Make(policy::Method::kAblation, 1, "push1-r3");
  io::Checkpoint b = Make(policy::Method::kAblation, 2, "push1-r3");
  EXPECT_THROW(Stitch(a, b, envs::ParseEnvId("push1-r4")), ShapeError);
  EXPECT_THROW(Stitch(a, b, envs::ParseEnvId("reach-r3")), ShapeError);
  EXPECT_NO_THROW(Stitch(a, b, envs::ParseEnvId("push2-r3-lock1")));
}

TEST(StitchTest, ModularStitchAcrossRobots) {
  // Task module from a 2-joint robot, robot module from a 3-joint robot.
  io::Checkpoint a = Make(policy::Method::kAblation, 1, "push1-r2");
  io::Checkpoint b = Make(policy::Method::kAblation, 2, "push2-r3");
  io::Checkpoint s = Stitch(a, b, envs::ParseEnvId("push1-r3"));
  EXPECT_EQ(s.actor.action_dim(), 3);
}

TEST(StitchTest, RecordsProvenance) {
  io::Checkpoint a = Make(policy::Method::kPs, 1);
  io::Checkpoint b = Make(policy::Method::kPs, 2);
  io::Checkpoint s = Stitch(a, b, envs::ParseEnvId("push1-r3"));
  EXPECT_TRUE(s.metadata["stitched"].get<bool>());
  EXPECT_EQ(s.metadata["task_parent"], io::CheckpointHash(a));
  EXPECT_EQ(s.metadata["robot_parent"], io::CheckpointHash(b));
  EXPECT_EQ(s.log_alpha, b.log_alpha);
}

TEST(ZeroShotTest, ReproducibleTable) {
  io::Checkpoint c = Make(policy::Method::kPs, 4, "reach-r2");
  const envs::EnvSpec env = envs::ParseEnvId("reach-r2");
  MetricTable a = ZeroShotEval(c.actor, env, 20, 5, 11);
  MetricTable b = ZeroShotEval(c.actor, env, 20, 5, 11);
  ASSERT_EQ(a.repeats.size(), 5u);
  EXPECT_EQ(a.ToJson(), b.ToJson());
  EXPECT_THROW(ZeroShotEval(c.actor, env, 20, 0, 11), UsageError);
}

TEST(ZeroShotTest, SummaryStatistics) {
  MetricTable t = Summarize({{0.2, 0.5, 10}, {0.4, 0.7, 10}, {0.6, 0.9, 10}});
  EXPECT_NEAR(t.success_mean, 0.4, 1e-15);
  EXPECT_NEAR(t.success_std, 0.2, 1e-15);
  EXPECT_NEAR(t.touching_mean, 0.7, 1e-15);
  EXPECT_NE(t.ToText().find("success"), std::string::npos);
}

TEST(FinetuneTest, ZeroEpochsReturnsInput) {
  io::Checkpoint c = Make(policy::Method::kPs, 5, "reach-r2");
  rl::TrainConfig config;
  config.epochs = 0;
  FinetuneResult r = FewShotFinetune(c, envs::ParseEnvId("reach-r2"), {}, config, 1);
  EXPECT_EQ(io::CheckpointHash(r.checkpoint), io::CheckpointHash(c));
  EXPECT_TRUE(r.metrics.empty());
}

TEST(FinetuneTest, LogsOneRecordPerEpochAndResetsAlpha) {
  io::Checkpoint c = Make(policy::Method::kPs, 5, "reach-r2");
  rl::TrainConfig config;
  config.epochs = 2;
  config.cycles_per_epoch = 1;
  config.episodes_per_cycle = 1;
  config.updates_per_cycle = 2;
  config.eval_episodes = 4;
  config.warmfill_epochs = 1;
  rl::SacConfig sac;
  sac.batch_size = 16;
  sac.auto_alpha = false;
  sac.initial_alpha = 0.3;
  FinetuneResult r = FewShotFinetune(c, envs::ParseEnvId("reach-r2"), sac, config, 1);
  EXPECT_EQ(r.metrics.size(), 2u);
  EXPECT_DOUBLE_EQ(std::exp(r.checkpoint.log_alpha), 0.3);
  EXPECT_NE(io::CheckpointHash(r.checkpoint), io::CheckpointHash(c));
  FinetuneResult again = FewShotFinetune(c, envs::ParseEnvId("reach-r2"), sac, config, 1);
  EXPECT_EQ(io::CheckpointHash(again.checkpoint), io::CheckpointHash(r.checkpoint));
}

}  // namespace
}  // namespace stitchkit::stitch
