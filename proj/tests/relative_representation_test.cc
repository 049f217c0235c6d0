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

#include "stitchkit/policy/relative_representation.h"

#include <cmath>

#include <gtest/gtest.h>

#include "stitchkit/errors.h"
#include "testing_util.h"

namespace stitchkit::policy {
namespace {

using ::stitchkit::testing::MaxRelativeError;
using ::stitchkit::testing::NumericGradient;
using ::stitchkit::testing::RandomMatrix;

Eigen::MatrixXd RandomOrthogonal(int n, Rng& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(RandomMatrix(n, n, rng));
  Eigen::MatrixXd q = qr.householderQ();
  // Random reflection as well.
  if (rng.UniformInt(2)) q.col(0) *= -1.0;
  return q;
}

TEST(RelativeRepresentationTest, OrthonormalWithoutNormalization) {
  Eigen::MatrixXd s(2, 1);
  s << 1, 0;
  Eigen::MatrixXd a(2, 2);
  a << 1, 0,
       0, 1;
  Eigen::MatrixXd r = RelativeRepresentation(s, a, false);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(r(1, 0), 0.0, 1e-15);
}

TEST(RelativeRepresentationTest, SelfSimilarityIsOne) {
  Rng rng(1);
  Eigen::MatrixXd a = RandomMatrix(6, 4, rng);
  Eigen::MatrixXd s = a.col(2);
  EXPECT_NEAR(RelativeRepresentation(s, a, true)(2, 0), 1.0, 1e-12);
  EXPECT_NEAR(RelativeRepresentation(s, a, false)(2, 0), 1.0, 1e-12);
}

TEST(RelativeRepresentationTest, StandardizedHandExample) {
  Eigen::MatrixXd s(3, 1);
  s << 1, 0, 0;
  Eigen::MatrixXd a(3, 2);
  a << 1, 0,
       0, 1,
       0, 0;
  // normalize([1,0,0]) = [2,-1,-1]/sqrt(2) and normalize([0,1,0]) =
  // [-1,2,-1]/sqrt(2): cosines 1 and (-2-2+1)/6.
  Eigen::MatrixXd r = RelativeRepresentation(s, a, true);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(r(1, 0), -0.5, 1e-12);
}

TEST(RelativeRepresentationTest, ZeroVectorsGiveZero) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(3, 1, 2.0);
  Rng rng(2);
  Eigen::MatrixXd a = RandomMatrix(3, 3, rng);
  EXPECT_EQ(RelativeRepresentation(s, a, true).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(RelativeRepresentation(Eigen::MatrixXd::Zero(3, 1), a, false)
                .cwiseAbs()
                .maxCoeff(),
            0.0);
}

TEST(RelativeRepresentationTest, Errors) {
  EXPECT_THROW(RelativeRepresentation(Eigen::MatrixXd::Ones(3, 1),
                                      Eigen::MatrixXd(3, 0)),
               ConfigError);
  EXPECT_THROW(RelativeRepresentation(Eigen::MatrixXd::Ones(3, 1),
                                      Eigen::MatrixXd::Ones(2, 2)),
               ShapeError);
}

TEST(RelativeRepresentationTest, IsometryAndScaleInvariance) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int l = 2 + static_cast<int>(rng.UniformInt(10));
    const int k = 1 + static_cast<int>(rng.UniformInt(8));
    Eigen::MatrixXd s = RandomMatrix(l, 3, rng, 2.0);
    Eigen::MatrixXd a = RandomMatrix(l, k, rng, 2.0);
    Eigen::MatrixXd rot = RandomOrthogonal(l, rng);
    const double scale = std::exp(rng.Uniform(-3.0, 3.0));
    Eigen::MatrixXd base = RelativeRepresentation(s, a, false);
    Eigen::MatrixXd moved =
        RelativeRepresentation(scale * rot * s, scale * rot * a, false);
    EXPECT_LT((base - moved).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(RelativeRepresentationTest, ShiftInvarianceWithNormalization) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int l = 2 + static_cast<int>(rng.UniformInt(10));
    Eigen::MatrixXd s = RandomMatrix(l, 2, rng);
    Eigen::MatrixXd a = RandomMatrix(l, 5, rng);
    const double c = rng.Uniform(-10.0, 10.0);
    Eigen::MatrixXd shifted_s = s.array() + c;
    Eigen::MatrixXd shifted_a = a.array() + c;
    EXPECT_LT((RelativeRepresentation(s, a) -
               RelativeRepresentation(shifted_s, shifted_a))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-9);
  }
}

TEST(RelativeRepresentationTest, BoundedAndArgmaxStable) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd s = RandomMatrix(8, 4, rng, 5.0);
    Eigen::MatrixXd a = RandomMatrix(8, 6, rng, 5.0);
    for (bool normalize : {false, true}) {
      Eigen::MatrixXd r = RelativeRepresentation(s, a, normalize);
      EXPECT_LE(r.maxCoeff(), 1.0);
      EXPECT_GE(r.minCoeff(), -1.0);
      Eigen::MatrixXd scaled = RelativeRepresentation(7.5 * s, 7.5 * a, normalize);
      for (int b = 0; b < 4; ++b) {
        Eigen::Index i0, i1;
        r.col(b).maxCoeff(&i0);
        scaled.col(b).maxCoeff(&i1);
        EXPECT_EQ(i0, i1);
      }
    }
  }
}

TEST(RelativeRepresentationTest, BackwardMatchesFiniteDifferences) {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const bool normalize = trial % 2 == 0;
    const int l = 3 + static_cast<int>(rng.UniformInt(6));
    const int k = 1 + static_cast<int>(rng.UniformInt(6));
    const int b = 1 + static_cast<int>(rng.UniformInt(4));
    Eigen::MatrixXd s = RandomMatrix(l, b, rng, 2.0);
    Eigen::MatrixXd a = RandomMatrix(l, k, rng, 2.0);
    Eigen::MatrixXd c = RandomMatrix(k, b, rng);
    RelRepCache cache;
    RelativeRepresentation(s, a, normalize, &cache);
    Eigen::MatrixXd gs, ga;
    RelativeRepresentationBackward(cache, c, &gs, &ga);
    auto fs = [&](const Eigen::VectorXd& flat) {
      return RelativeRepresentation(flat.reshaped(l, b), a, normalize)
          .cwiseProduct(c)
          .sum();
    };
    auto fa = [&](const Eigen::VectorXd& flat) {
      return RelativeRepresentation(s, flat.reshaped(l, k), normalize)
          .cwiseProduct(c)
          .sum();
    };
    EXPECT_LT(MaxRelativeError(gs.reshaped(), NumericGradient(fs, s.reshaped())), 1e-5);
    EXPECT_LT(MaxRelativeError(ga.reshaped(), NumericGradient(fa, a.reshaped())), 1e-5);
  }
}

}  // namespace
}  // namespace stitchkit::policy
