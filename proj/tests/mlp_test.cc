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

#include "stitchkit/nn/mlp.h"

#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "stitchkit/errors.h"
#include "testing_util.h"

namespace stitchkit::nn {
namespace {

using ::stitchkit::testing::MaxRelativeError;
using ::stitchkit::testing::MinReluMargin;
using ::stitchkit::testing::NumericGradient;
using ::stitchkit::testing::RandomMatrix;

DenseLayer Layer(Eigen::MatrixXd w, Eigen::VectorXd b, Activation act) {
  return DenseLayer{std::move(w), std::move(b), act};
}

// Plain loops over std::vector, sharing nothing with Mlp::Forward.
std::vector<double> ReferenceForward(const Mlp& net, std::vector<double> x) {
  for (const DenseLayer& layer : net.layers()) {
    std::vector<double> y(layer.weight.rows());
    for (int i = 0; i < layer.weight.rows(); ++i) {
      double acc = layer.bias(i);
      for (int j = 0; j < layer.weight.cols(); ++j) acc += layer.weight(i, j) * x[j];
      switch (layer.activation) {
        case Activation::kRelu:
          acc = acc > 0.0 ? acc : 0.0;
          break;
        case Activation::kTanh:
          acc = std::tanh(acc);
          break;
        case Activation::kIdentity:
          break;
      }
      y[i] = acc;
    }
    x = std::move(y);
  }
  return x;
}

TEST(MlpTest, SingleAffineLayer) {
  Mlp net({Layer(Eigen::MatrixXd::Constant(1, 1, 2.0),
                 Eigen::VectorXd::Constant(1, 1.0), Activation::kIdentity)});
  EXPECT_DOUBLE_EQ(net.Forward(Eigen::VectorXd(Eigen::VectorXd::Constant(1, 3.0)))(0), 7.0);
}

TEST(MlpTest, ReluClamps) {
  Mlp net({Layer(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                 Activation::kRelu)});
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  Eigen::VectorXd y = net.Forward(x);
  EXPECT_EQ(y(0), 1.0);
  EXPECT_EQ(y(1), 0.0);
}

TEST(MlpTest, MatchesReferenceEvaluator) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<int> widths = {5, 12, 9, 4};
    Mlp net = Mlp::Create(widths, trial % 2 ? Activation::kTanh : Activation::kRelu,
                          Activation::kIdentity, rng);
    Eigen::VectorXd x = RandomMatrix(5, 1, rng, 2.0);
    std::vector<double> ref =
        ReferenceForward(net, std::vector<double>(x.data(), x.data() + x.size()));
    Eigen::VectorXd y = net.Forward(x);
    ASSERT_EQ(y.size(), 4);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(y(i), ref[i], 1e-12);
  }
}

TEST(MlpTest, BatchedForwardMatchesColumns) {
  Rng rng(4);
  const std::vector<int> widths = {3, 8, 2};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  Eigen::MatrixXd x = RandomMatrix(3, 6, rng);
  Eigen::MatrixXd y = net.Forward(x);
  for (int c = 0; c < 6; ++c) {
    Eigen::VectorXd col = x.col(c);
    EXPECT_TRUE(net.Forward(col).isApprox(y.col(c), 1e-14));
  }
}

TEST(MlpTest, InitWithinFanInBound) {
  Rng rng(5);
  const std::vector<int> widths = {16, 32, 1};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  for (const DenseLayer& layer : net.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    EXPECT_LE(layer.weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(layer.bias.cwiseAbs().maxCoeff(), bound);
  }
}

TEST(MlpTest, ShapeMismatchThrows) {
  Rng rng(6);
  const std::vector<int> widths = {3, 4, 2};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  EXPECT_THROW(net.Forward(Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 1))), ShapeError);
  std::vector<DenseLayer> broken = {
      Layer(Eigen::MatrixXd::Zero(4, 3), Eigen::VectorXd::Zero(4), Activation::kRelu),
      Layer(Eigen::MatrixXd::Zero(2, 5), Eigen::VectorXd::Zero(2),
            Activation::kIdentity)};
  EXPECT_THROW(Mlp{broken}, ShapeError);
}

TEST(MlpTest, ForwardIsBitDeterministic) {
  Rng rng(7);
  const std::vector<int> widths = {4, 16, 16, 3};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  Eigen::MatrixXd x = RandomMatrix(4, 10, rng);
  Eigen::MatrixXd a = net.Forward(x);
  Eigen::MatrixXd b = net.Forward(x);
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * a.size()));
}

TEST(MlpBackwardTest, LinearLayerGradient) {
  Mlp net({Layer(Eigen::MatrixXd::Constant(1, 2, 0.5), Eigen::VectorXd::Zero(1),
                 Activation::kIdentity)});
  Eigen::MatrixXd x(2, 1);
  x << 3.0, -2.0;
  GradientTape tape;
  net.Forward(x, tape);
  MlpGradient g = net.Backward(tape, Eigen::MatrixXd::Ones(1, 1));
  // Flat layout: weight entries, then bias.
  ASSERT_EQ(g.params.size(), 3);
  EXPECT_DOUBLE_EQ(g.params(0), 3.0);
  EXPECT_DOUBLE_EQ(g.params(1), -2.0);
  EXPECT_DOUBLE_EQ(g.params(2), 1.0);
  EXPECT_DOUBLE_EQ(g.input(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.input(1, 0), 0.5);
}

TEST(MlpBackwardTest, ZeroOutputGradient) {
  Rng rng(8);
  const std::vector<int> widths = {3, 5, 2};
  Mlp net = Mlp::Create(widths, Activation::kTanh, Activation::kIdentity, rng);
  GradientTape tape;
  net.Forward(RandomMatrix(3, 4, rng), tape);
  MlpGradient g = net.Backward(tape, Eigen::MatrixXd::Zero(2, 4));
  EXPECT_EQ(g.params.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.input.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MlpBackwardTest, TapeIsSingleUse) {
  Rng rng(9);
  const std::vector<int> widths = {2, 3, 1};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  GradientTape unused;
  EXPECT_THROW(net.Backward(unused, Eigen::MatrixXd::Ones(1, 1)), UsageError);
  GradientTape tape;
  net.Forward(RandomMatrix(2, 1, rng), tape);
  net.Backward(tape, Eigen::MatrixXd::Ones(1, 1));
  EXPECT_TRUE(tape.consumed());
  EXPECT_THROW(net.Backward(tape, Eigen::MatrixXd::Ones(1, 1)), UsageError);
}

TEST(MlpBackwardTest, TapeFromOtherNetworkRejected) {
  Rng rng(10);
  const std::vector<int> widths = {2, 3, 1};
  Mlp a = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  Mlp b = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  GradientTape tape;
  a.Forward(RandomMatrix(2, 1, rng), tape);
  EXPECT_THROW(b.Backward(tape, Eigen::MatrixXd::Ones(1, 1)), UsageError);
}

TEST(MlpBackwardTest, TapeStaleAfterParameterChange) {
  Rng rng(11);
  const std::vector<int> widths = {2, 3, 1};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  GradientTape tape;
  net.Forward(RandomMatrix(2, 1, rng), tape);
  net.Assign(net.Flatten() * 0.5);
  EXPECT_THROW(net.Backward(tape, Eigen::MatrixXd::Ones(1, 1)), UsageError);
}

// Random nets of at most 3 layers and 16 units, checked against central
// differences on a random linear functional of the batched output.
TEST(MlpBackwardTest, MatchesFiniteDifferences) {
  Rng rng(12);
  int checked = 0;
  for (int trial = 0; checked < 50 && trial < 500; ++trial) {
    const int depth = 1 + static_cast<int>(rng.UniformInt(3));
    std::vector<int> widths = {1 + static_cast<int>(rng.UniformInt(16))};
    for (int l = 0; l < depth; ++l) widths.push_back(1 + static_cast<int>(rng.UniformInt(16)));
    const Activation act = rng.UniformInt(2) ? Activation::kRelu : Activation::kTanh;
    Mlp net = Mlp::Create(widths, act, Activation::kIdentity, rng);
    const Eigen::MatrixXd x = RandomMatrix(widths.front(), 3, rng, 2.0);
    if (MinReluMargin(net, x) < 1e-3) continue;
    const Eigen::MatrixXd c = RandomMatrix(widths.back(), 3, rng);

    GradientTape tape;
    net.Forward(x, tape);
    MlpGradient g = net.Backward(tape, c);

    Mlp probe = net;
    auto loss_params = [&](const Eigen::VectorXd& p) {
      probe.Assign(p);
      return probe.Forward(x).cwiseProduct(c).sum();
    };
    EXPECT_LT(MaxRelativeError(g.params, NumericGradient(loss_params, net.Flatten())),
              1e-5);
    auto loss_input = [&](const Eigen::VectorXd& flat) {
      return net.Forward(Eigen::MatrixXd(flat.reshaped(x.rows(), x.cols())))
          .cwiseProduct(c)
          .sum();
    };
    Eigen::VectorXd gx = g.input.reshaped();
    EXPECT_LT(MaxRelativeError(gx, NumericGradient(loss_input, x.reshaped())), 1e-5);
    ++checked;
  }
  EXPECT_EQ(checked, 50);
}

TEST(MlpTest, FlattenAssignRoundTrip) {
  Rng rng(13);
  const std::vector<int> widths = {3, 7, 5, 2};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  Eigen::VectorXd flat = net.Flatten();
  EXPECT_EQ(flat.size(), net.num_params());
  EXPECT_EQ(flat.size(), 3 * 7 + 7 + 7 * 5 + 5 + 5 * 2 + 2);
  Mlp copy = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  copy.Assign(flat);
  EXPECT_TRUE(copy == net);
  EXPECT_THROW(copy.Assign(Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST(MlpTest, SliceAndConcatCompose) {
  Rng rng(14);
  const std::vector<int> widths = {3, 6, 4, 6, 2};
  Mlp net = Mlp::Create(widths, Activation::kRelu, Activation::kIdentity, rng);
  Mlp top = net.Slice(0, 2);
  Mlp bottom = net.Slice(2, 4);
  EXPECT_EQ(top.output_dim(), 4);
  Eigen::MatrixXd x = RandomMatrix(3, 5, rng);
  EXPECT_TRUE(bottom.Forward(top.Forward(x)) == net.Forward(x));
  EXPECT_TRUE(Mlp::Concat(top, bottom) == net);
  EXPECT_TRUE(net.Activations(x, 1) == top.Forward(x));
}

}  // namespace
}  // namespace stitchkit::nn
