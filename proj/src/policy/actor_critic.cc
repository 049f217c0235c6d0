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

#include "stitchkit/policy/actor_critic.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "stitchkit/errors.h"

namespace stitchkit::policy {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double Softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(1 - tanh(u)^2), stable for large |u|.
double LogSechSquared(double u) {
  return 2.0 * (std::numbers::ln2 - u - Softplus(-2.0 * u));
}

}  // namespace

Actor::Actor(SplitNetwork network) : network_(std::move(network)) {
  const int out = network_.spec().output_dim;
  if (out % 2 != 0) throw ShapeError("actor output must hold mean and log_std");
  action_dim_ = out / 2;
}

GaussianHead Actor::Forward(const Eigen::MatrixXd& task_state,
                            const Eigen::MatrixXd& robot_state,
                            const ForwardOptions& options,
                            ActorTape* tape) const {
  Eigen::MatrixXd out = network_.Forward(task_state, robot_state, options,
                                         tape != nullptr ? &tape->network : nullptr);
  GaussianHead head;
  head.mean = out.topRows(action_dim_);
  Eigen::MatrixXd raw = out.bottomRows(action_dim_);
  head.log_std = raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  if (tape != nullptr) tape->raw_log_std = std::move(raw);
  return head;
}

SplitGradient Actor::Backward(ActorTape& tape, const Eigen::MatrixXd& grad_mean,
                              const Eigen::MatrixXd& grad_log_std) const {
  Eigen::MatrixXd grad(2 * action_dim_, grad_mean.cols());
  grad.topRows(action_dim_) = grad_mean;
  grad.bottomRows(action_dim_) =
      (tape.raw_log_std.array() >= kLogStdMin && tape.raw_log_std.array() <= kLogStdMax)
          .select(grad_log_std, 0.0);
  return network_.Backward(tape.network, grad);
}

Eigen::MatrixXd Actor::DeterministicAction(const Eigen::MatrixXd& task_state,
                                           const Eigen::MatrixXd& robot_state) const {
  return Forward(task_state, robot_state).mean.array().tanh().matrix();
}

Critic::Critic(SplitNetwork network) : network_(std::move(network)) {
  if (network_.spec().output_dim != 1) {
    throw ShapeError("critic output must be scalar");
  }
}

Eigen::MatrixXd Critic::Forward(const Eigen::MatrixXd& task_state,
                                const Eigen::MatrixXd& robot_state,
                                const Eigen::MatrixXd& action,
                                SplitTape* tape,
                                const ForwardOptions& options) const {
  if (robot_state.cols() != action.cols()) {
    throw ShapeError("critic: robot state and action batch sizes differ");
  }
  Eigen::MatrixXd extra(robot_state.rows() + action.rows(), robot_state.cols());
  extra.topRows(robot_state.rows()) = robot_state;
  extra.bottomRows(action.rows()) = action;
  return network_.Forward(task_state, extra, options, tape);
}

SplitGradient Critic::Backward(SplitTape& tape, const Eigen::MatrixXd& grad_q) const {
  return network_.Backward(tape, grad_q);
}

SquashedSample SquashedGaussian(const Eigen::MatrixXd& mean,
                                const Eigen::MatrixXd& log_std,
                                const Eigen::MatrixXd& noise) {
  if (mean.rows() != log_std.rows() || mean.cols() != log_std.cols() ||
      noise.rows() != mean.rows() || noise.cols() != mean.cols()) {
    throw ShapeError("squashed gaussian: mean, log_std and noise shapes differ");
  }
  SquashedSample s;
  s.noise = noise;
  s.pre_tanh = mean.array() + log_std.array().exp() * noise.array();
  s.action = s.pre_tanh.array().tanh().matrix();
  s.log_prob.resize(mean.cols());
  for (Eigen::Index b = 0; b < mean.cols(); ++b) {
    double lp = 0.0;
    for (Eigen::Index i = 0; i < mean.rows(); ++i) {
      const double xi = noise(i, b);
      lp += -0.5 * xi * xi - log_std(i, b) - kHalfLog2Pi -
            LogSechSquared(s.pre_tanh(i, b));
    }
    s.log_prob(b) = lp;
  }
  return s;
}

SquashedSample SampleAction(const Eigen::MatrixXd& mean,
                            const Eigen::MatrixXd& log_std, Rng& rng,
                            bool deterministic) {
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
  if (!deterministic) {
    for (Eigen::Index b = 0; b < noise.cols(); ++b) {
      for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, b) = rng.Normal();
    }
  }
  return SquashedGaussian(mean, log_std, noise);
}

Eigen::VectorXd SquashedLogProb(const Eigen::MatrixXd& mean,
                                const Eigen::MatrixXd& log_std,
                                const Eigen::MatrixXd& action) {
  Eigen::VectorXd out(mean.cols());
  for (Eigen::Index b = 0; b < mean.cols(); ++b) {
    double lp = 0.0;
    for (Eigen::Index i = 0; i < mean.rows(); ++i) {
      const double u = std::atanh(action(i, b));
      const double xi = (u - mean(i, b)) * std::exp(-log_std(i, b));
      lp += -0.5 * xi * xi - log_std(i, b) - kHalfLog2Pi - LogSechSquared(u);
    }
    out(b) = lp;
  }
  return out;
}

// d log_prob / d pre_tanh = 2 tanh(u); d action / d pre_tanh = 1 - a^2;
// pre_tanh = mean + exp(log_std) * noise.
void SquashedGaussianBackward(const SquashedSample& sample,
                              const Eigen::MatrixXd& log_std,
                              const Eigen::MatrixXd& grad_action,
                              const Eigen::VectorXd& grad_log_prob,
                              Eigen::MatrixXd* grad_mean,
                              Eigen::MatrixXd* grad_log_std) {
  const Eigen::ArrayXXd a = sample.action.array();
  Eigen::ArrayXXd grad_pre = grad_action.array() * (1.0 - a.square());
  grad_pre += 2.0 * (a.rowwise() * grad_log_prob.transpose().array());
  if (grad_mean != nullptr) *grad_mean = grad_pre.matrix();
  if (grad_log_std != nullptr) {
    Eigen::ArrayXXd g = grad_pre * log_std.array().exp() * sample.noise.array();
    g.rowwise() -= grad_log_prob.transpose().array();
    *grad_log_std = g.matrix();
  }
}

}  // namespace stitchkit::policy
