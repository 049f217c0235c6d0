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

#include "stitchkit/rl/sac.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "stitchkit/errors.h"

namespace stitchkit::rl {
namespace {

using policy::Critic;
using policy::ForwardOptions;
using policy::SplitGradient;
using policy::SplitNetwork;
using policy::SplitTape;

void CheckFinite(double value, const char* what, int64_t update) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "non-finite " << what << " (" << value << ") at update " << update;
    throw NumericalError(os.str());
  }
}

Eigen::MatrixXd NormalNoise(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd noise(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) noise(i, j) = rng.Normal();
  }
  return noise;
}

}  // namespace

void SacConfig::Validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(initial_alpha > 0.0)) throw ConfigError("initial_alpha must be positive");
}

NetworkOptimizer::NetworkOptimizer(const SplitNetwork& net, const nn::AdamConfig& config)
    : task(net.task_module().num_params(), config),
      robot(net.robot_module().num_params(), config) {}

void NetworkOptimizer::Step(SplitNetwork& net, const SplitGradient& grad) {
  Eigen::VectorXd t = net.task_module().Flatten();
  task.Step(t, grad.task);
  net.SetTaskParams(t);
  Eigen::VectorXd r = net.robot_module().Flatten();
  robot.Step(r, grad.robot);
  net.SetRobotParams(r);
}

void PolyakUpdate(const SplitNetwork& online, SplitNetwork& target, double tau) {
  target.SetTaskParams(tau * online.task_module().Flatten() +
                       (1.0 - tau) * target.task_module().Flatten());
  target.SetRobotParams(tau * online.robot_module().Flatten() +
                        (1.0 - tau) * target.robot_module().Flatten());
}

SacAgent::SacAgent(policy::Actor actor, Critic q1, Critic q2, SacConfig config,
                   uint64_t seed)
    : config_(config),
      actor_(std::move(actor)),
      q1_(std::move(q1)),
      q2_(std::move(q2)),
      rng_(MixSeed(seed, 0x5ac)) {
  config_.Validate();
  ResetOptimizers();
  ResetAlpha(config_.initial_alpha);
}

SacAgent SacAgent::Create(const policy::ArchitectureConfig& arch, const policy::Dims& dims,
                          std::shared_ptr<const policy::AnchorSet> anchors,
                          SacConfig config, uint64_t seed) {
  const std::string hash = anchors != nullptr ? anchors->hash() : "";
  policy::NetworkSpec actor_spec = policy::ActorSpec(arch, dims, hash);
  policy::NetworkSpec critic_spec = policy::CriticSpec(arch, dims, hash);
  Rng rng(MixSeed(seed, 0x1417));
  SplitNetwork actor_net(actor_spec, rng);
  SplitNetwork q1_net(critic_spec, rng);
  SplitNetwork q2_net(critic_spec, rng);
  for (SplitNetwork* net : {&actor_net, &q1_net, &q2_net}) {
    if (net->spec().alignment != policy::Alignment::kRelative ||
        net->spec().kind != policy::NetworkKind::kModular) {
      continue;
    }
    if (anchors == nullptr) {
      throw ConfigError("relative alignment needs an anchor set");
    }
    net->AttachAnchors(anchors);
  }
  return SacAgent(policy::Actor(std::move(actor_net)), Critic(std::move(q1_net)),
                  Critic(std::move(q2_net)), config, seed);
}

double SacAgent::target_entropy() const {
  return std::isnan(config_.target_entropy) ? -static_cast<double>(actor_.action_dim())
                                            : config_.target_entropy;
}

void SacAgent::ResetOptimizers() {
  target_q1_ = q1_;
  target_q2_ = q2_;
  actor_opt_ = NetworkOptimizer(actor_.network(), config_.adam);
  q1_opt_ = NetworkOptimizer(q1_.network(), config_.adam);
  q2_opt_ = NetworkOptimizer(q2_.network(), config_.adam);
  alpha_opt_ = nn::Adam(1, config_.adam);
}

void SacAgent::ResetAlpha(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  log_alpha_ = Eigen::VectorXd::Constant(1, std::log(alpha));
  alpha_opt_ = nn::Adam(1, config_.adam);
}

Eigen::MatrixXd SacAgent::SampleActions(const Eigen::MatrixXd& task_state,
                                        const Eigen::MatrixXd& robot_state) {
  policy::GaussianHead head = actor_.Forward(task_state, robot_state);
  return policy::SampleAction(head.mean, head.log_std, rng_).action;
}

Eigen::VectorXd SacAgent::CriticTargets(const TransitionBatch& batch,
                                        const Eigen::MatrixXd& noise) const {
  policy::GaussianHead next = actor_.Forward(batch.next_task, batch.next_robot);
  policy::SquashedSample a = policy::SquashedGaussian(next.mean, next.log_std, noise);
  const Eigen::MatrixXd t1 = target_q1_.Forward(batch.next_task, batch.next_robot, a.action);
  const Eigen::MatrixXd t2 = target_q2_.Forward(batch.next_task, batch.next_robot, a.action);
  const Eigen::VectorXd soft =
      t1.cwiseMin(t2).transpose() - alpha() * a.log_prob;
  return batch.reward.array() +
         config_.gamma * (1.0 - batch.done.array()) * soft.array();
}

double SacAgent::ActorObjective(const TransitionBatch& batch, const Eigen::MatrixXd& noise,
                               const ForwardOptions& options, SplitGradient* grad,
                               Eigen::VectorXd* log_prob) const {
  const int b = batch.size();
  const int n = actor_.action_dim();
  const double alpha_now = alpha();
  policy::ActorTape actor_tape;
  policy::GaussianHead head = actor_.Forward(batch.task, batch.robot, options, &actor_tape);
  policy::SquashedSample sample = policy::SquashedGaussian(head.mean, head.log_std, noise);
  SplitTape tape1;
  SplitTape tape2;
  const Eigen::MatrixXd v1 = q1_.Forward(batch.task, batch.robot, sample.action, &tape1, options);
  const Eigen::MatrixXd v2 = q2_.Forward(batch.task, batch.robot, sample.action, &tape2, options);
  Eigen::RowVectorXd g1 = Eigen::RowVectorXd::Zero(b);
  Eigen::RowVectorXd g2 = Eigen::RowVectorXd::Zero(b);
  double loss = 0.0;
  for (int i = 0; i < b; ++i) {
    // Ties go to the first critic.
    const bool first = v1(0, i) <= v2(0, i);
    loss += alpha_now * sample.log_prob(i) - (first ? v1(0, i) : v2(0, i));
    (first ? g1 : g2)(i) = -1.0 / b;
  }
  if (log_prob != nullptr) *log_prob = sample.log_prob;
  if (grad != nullptr) {
    const Eigen::MatrixXd grad_action = q1_.Backward(tape1, g1).extra.bottomRows(n) +
                                        q2_.Backward(tape2, g2).extra.bottomRows(n);
    Eigen::MatrixXd grad_mean;
    Eigen::MatrixXd grad_log_std;
    policy::SquashedGaussianBackward(sample, head.log_std, grad_action,
                                     Eigen::VectorXd::Constant(b, alpha_now / b),
                                     &grad_mean, &grad_log_std);
    *grad = actor_.Backward(actor_tape, grad_mean, grad_log_std);
  }
  return loss / b;
}

SacLosses SacAgent::Update(const TransitionBatch& batch) {
  const int b = batch.size();
  if (b == 0) throw UsageError("empty batch");
  const int n = actor_.action_dim();
  SacLosses losses;
  ForwardOptions train{true, &rng_};

  const Eigen::VectorXd y = CriticTargets(batch, NormalNoise(n, b, rng_));
  auto critic_step = [&](Critic& q, NetworkOptimizer& opt) {
    SplitTape tape;
    const Eigen::MatrixXd pred = q.Forward(batch.task, batch.robot, batch.action, &tape, train);
    const Eigen::RowVectorXd err = pred.row(0) - y.transpose();
    const double loss = err.squaredNorm() / b;
    CheckFinite(loss, "critic loss", updates_);
    opt.Step(q.network(), q.Backward(tape, (2.0 / b) * err));
    return loss;
  };
  losses.q1 = critic_step(q1_, q1_opt_);
  losses.q2 = critic_step(q2_, q2_opt_);

  Eigen::VectorXd log_prob;
  policy::SplitGradient actor_grad;
  losses.actor = ActorObjective(batch, NormalNoise(n, b, rng_), train, &actor_grad, &log_prob);
  CheckFinite(losses.actor, "actor loss", updates_);
  actor_opt_.Step(actor_.network(), actor_grad);

  losses.entropy = -log_prob.mean();
  const double gap = log_prob.mean() + target_entropy();
  losses.alpha_loss = -log_alpha_(0) * gap;
  CheckFinite(losses.alpha_loss, "alpha loss", updates_);
  if (config_.auto_alpha) {
    alpha_opt_.Step(log_alpha_, Eigen::VectorXd::Constant(1, -gap));
  }
  losses.alpha = alpha();

  PolyakUpdate(q1_.network(), target_q1_.network(), config_.tau);
  PolyakUpdate(q2_.network(), target_q2_.network(), config_.tau);
  ++updates_;
  return losses;
}

}  // namespace stitchkit::rl
