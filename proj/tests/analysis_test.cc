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

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "stitchkit/analysis/analysis.h"
#include "stitchkit/errors.h"
#include "stitchkit/policy/architecture.h"
#include "testing_util.h"

namespace stitchkit::analysis {
namespace {

policy::Actor MakeActor(policy::Method method, const envs::EnvSpec& env, uint64_t seed,
                        std::shared_ptr<const policy::AnchorSet> anchors = nullptr) {
  policy::ArchitectureConfig arch;
  arch.method = method;
  const int n = env.robot.n_joints();
  policy::Dims dims{envs::TaskStateDim(env.task.kind), n, n};
  Rng rng(seed);
  policy::SplitNetwork net(policy::ActorSpec(arch, dims, anchors ? anchors->hash() : ""), rng);
  if (anchors) net.AttachAnchors(anchors);
  return policy::Actor(std::move(net));
}

TEST(PcaTest, CollinearPointsHaveOneComponent) {
  Eigen::MatrixXd x(3, 20);
  for (int i = 0; i < 20; ++i) x.col(i) = (0.3 * i - 2.0) * Eigen::Vector3d(1.0, -2.0, 0.5);
  PcaResult r = PcaProject(x, 2);
  EXPECT_NEAR(r.explained_variance_ratio(0), 1.0, 1e-12);
  EXPECT_FALSE(r.degenerate);
}

TEST(PcaTest, TwoDimensionalDataIsRigidlyMapped) {
  Rng rng(1);
  Eigen::MatrixXd x = testing::RandomMatrix(2, 40, rng, 3.0);
  PcaResult r = PcaProject(x, 2);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      EXPECT_NEAR((r.projection.col(i) - r.projection.col(j)).norm(), (x.col(i) - x.col(j)).norm(),
                  1e-9);
    }
  }
}

TEST(PcaTest, FullRankRoundTrip) {
  Rng rng(2);
  Eigen::MatrixXd x = testing::RandomMatrix(16, 200, rng, 2.0);
  PcaResult r = PcaProject(x, 16);
  const Eigen::MatrixXd back = r.components * r.projection;
  EXPECT_LT((back - (x.colwise() - r.mean)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(r.explained_variance_ratio.sum(), 1.0, 1e-12);
}

TEST(PcaTest, AgreesWithCovarianceEigenvectors) {
  // Independent route: eigen-decomposition of the sample covariance.
  Rng rng(3);
  Eigen::MatrixXd x = testing::RandomMatrix(5, 300, rng);
  x.row(0) *= 4.0;
  x.row(3) *= 2.0;
  PcaResult r = PcaProject(x, 3);
  const Eigen::MatrixXd c = x.colwise() - x.rowwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c * c.transpose());
  const double total = eig.eigenvalues().sum();
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd v = eig.eigenvectors().col(4 - k);
    EXPECT_NEAR(std::abs(v.dot(r.components.col(k))), 1.0, 1e-9);
    EXPECT_NEAR(r.explained_variance_ratio(k), eig.eigenvalues()(4 - k) / total, 1e-9);
  }
}

TEST(PcaTest, SignConventionAndDegenerateInput) {
  Rng rng(4);
  Eigen::MatrixXd x = testing::RandomMatrix(4, 30, rng);
  PcaResult r = PcaProject(x, 3);
  PcaResult flipped = PcaProject(-x, 3);
  for (int k = 0; k < 3; ++k) {
    Eigen::Index arg;
    r.components.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(r.components(arg, k), 0.0);
  }
  EXPECT_LT((r.components - flipped.components).cwiseAbs().maxCoeff(), 1e-9);
  PcaResult d = PcaProject(Eigen::MatrixXd::Constant(3, 10, 2.5), 2);
  EXPECT_TRUE(d.degenerate);
  EXPECT_TRUE(d.projection.isZero(0.0));
  EXPECT_TRUE(std::isnan(d.explained_variance_ratio(0)));
  EXPECT_THROW(PcaProject(x.leftCols(3), 3), ShapeError);
}

TEST(DistanceTest, IdenticalAndAntipodal) {
  Rng rng(5);
  Eigen::MatrixXd a = testing::RandomMatrix(8, 50, rng);
  DistanceReport same = PairwiseDistances(a, a);
  EXPECT_EQ(same.mean_cosine, 0.0);
  EXPECT_EQ(same.mean_l2, 0.0);
  DistanceReport anti = PairwiseDistances(a, -a);
  EXPECT_NEAR(anti.mean_cosine, 2.0, 1e-12);
  EXPECT_THROW(PairwiseDistances(a, a.topRows(4)), ShapeError);
}

TEST(DistanceTest, MatchesFormula) {
  Eigen::MatrixXd a(2, 2);
  Eigen::MatrixXd b(2, 2);
  a << 1, 0, 0, 2;
  b << 0, 0, 1, 3;
  // Pair 0: orthogonal, distance sqrt(2). Pair 1: parallel, distance 1.
  DistanceReport r = PairwiseDistances(a, b);
  EXPECT_NEAR(r.mean_cosine, 0.5, 1e-15);
  EXPECT_NEAR(r.mean_l2, (std::sqrt(2.0) + 1.0) / 2.0, 1e-15);
}

TEST(DistanceTest, MatrixIsSymmetricWithZeroDiagonal) {
  Rng rng(6);
  std::vector<Eigen::MatrixXd> sets;
  for (int i = 0; i < 3; ++i) sets.push_back(testing::RandomMatrix(4, 30, rng));
  DistanceReport r = PairwiseDistances(sets);
  EXPECT_TRUE(r.cosine_matrix.isApprox(r.cosine_matrix.transpose()));
  EXPECT_EQ(r.cosine_matrix.diagonal().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(r.mean_cosine,
              (r.cosine_matrix(0, 1) + r.cosine_matrix(0, 2) + r.cosine_matrix(1, 2)) / 3.0, 1e-15);
  // Symmetric in its arguments.
  EXPECT_EQ(PairwiseDistances(sets[0], sets[1]).mean_cosine,
            PairwiseDistances(sets[1], sets[0]).mean_cosine);
  EXPECT_GE(r.mean_cosine, 0.0);
  EXPECT_LE(r.mean_cosine, 2.0);
}

TEST(LatentTest, QuadrantLabelsAndSize) {
  envs::EnvSpec env = envs::ParseEnvId("reach-r2-q1");
  policy::Actor actor = MakeActor(policy::Method::kAblation, env, 1);
  LatentDump dump = CollectLatents(actor, env, 137, 3);
  EXPECT_EQ(dump.size(), 137);
  EXPECT_EQ(dump.latents.cols(), 137);
  for (int label : dump.labels) EXPECT_EQ(label, 1);
  LatentDump again = CollectLatents(actor, env, 137, 3);
  EXPECT_EQ(again.latents, dump.latents);
  const std::string csv = LatentCsv(dump);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 138);
  EXPECT_EQ(csv.substr(0, 28), "index,label,task_0,task_1,la");
}

TEST(LatentTest, TaskLatentsIgnoreRobot) {
  Eigen::MatrixXd anchors_m(2, 16);
  for (int i = 0; i < 16; ++i) anchors_m.col(i) << std::cos(0.39 * i), 1.2 * std::sin(0.39 * i);
  auto anchors = std::make_shared<policy::AnchorSet>(anchors_m);
  policy::Actor a = MakeActor(policy::Method::kPs, envs::ParseEnvId("reach-r2"), 1, anchors);
  policy::Actor b = MakeActor(policy::Method::kPs, envs::ParseEnvId("reach-r3"), 1, anchors);
  Rng rng(7);
  Eigen::MatrixXd t = testing::RandomMatrix(2, 10, rng);
  // Same seed and task side: identical latents despite different robots.
  EXPECT_EQ(TaskLatents(a.network(), t), TaskLatents(b.network(), t));
  EXPECT_EQ(TaskLatents(a.network(), t, LatentStage::kEmbedding).rows(), 16);
}

TEST(RegressionTest, RealizableLinearMap) {
  Rng rng(8);
  Eigen::MatrixXd x = testing::RandomMatrix(8, 4000, rng);
  Eigen::MatrixXd w = testing::RandomMatrix(2, 8, rng);
  RegressionOptions opt;
  opt.batch_size = 64;
  RegressionReport r = FitRegression(x, {{"y", w * x}}, 1, opt);
  EXPECT_GE(r.Get("y").r2, 0.999);
  EXPECT_EQ(r.train_size, 3200);
  EXPECT_EQ(r.test_size, 800);
}

TEST(RegressionTest, ShuffledLabelsCarryNoSignal) {
  Rng rng(9);
  Eigen::MatrixXd x = testing::RandomMatrix(12, 1000, rng);
  Eigen::MatrixXd y = testing::RandomMatrix(2, 1000, rng);
  RegressionReport r = FitRegression(x, {{"y", y}}, 2);
  EXPECT_LT(r.Get("y").r2, 0.1);
}

TEST(RegressionTest, ProbeReportsEachTarget) {
  envs::EnvSpec env = envs::ParseEnvId("push1-r3");
  policy::Actor actor = MakeActor(policy::Method::kAblation, env, 2);
  RegressionOptions opt;
  opt.epochs = 5;
  RegressionReport r = RegressionProbe(actor, env, 300, 4, opt);
  EXPECT_EQ(r.targets.size(), 3u);
  EXPECT_EQ(r.train_size + r.test_size, 300);
  for (const TargetScore& t : r.targets) EXPECT_LE(t.r2, 1.0);
  EXPECT_NO_THROW(r.Get("object"));
  EXPECT_THROW(RegressionProbe(actor, env, 5, 4), ConfigError);
  EXPECT_EQ(RegressionProbe(actor, env, 300, 4, opt).ToJson(), r.ToJson());
}

}  // namespace
}  // namespace stitchkit::analysis
