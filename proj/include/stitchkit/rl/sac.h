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

#ifndef STITCHKIT_RL_SAC_H_
#define STITCHKIT_RL_SAC_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "stitchkit/nn/adam.h"
#include "stitchkit/nn/random.h"
#include "stitchkit/policy/actor_critic.h"
#include "stitchkit/policy/anchor_set.h"
#include "stitchkit/policy/architecture.h"
#include "stitchkit/rl/replay.h"

namespace stitchkit::rl {

struct SacConfig {
  double gamma = 0.98;
  double tau = 0.005;
  int batch_size = 256;
  nn::AdamConfig adam{.learning_rate = 1e-3};
  double initial_alpha = 0.1;
  bool auto_alpha = true;
  // Defaults to -action_dim when unset (NaN).
  double target_entropy = std::numeric_limits<double>::quiet_NaN();

  void Validate() const;
};

struct SacLosses {
  double q1 = 0.0;
  double q2 = 0.0;
  double actor = 0.0;
  double alpha_loss = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;  // -mean log_prob of the actor's samples
};

// Per-module Adam state of one split network.
struct NetworkOptimizer {
  nn::Adam task;
  nn::Adam robot;

  NetworkOptimizer() = default;
  NetworkOptimizer(const policy::SplitNetwork& net, const nn::AdamConfig& config);
  void Step(policy::SplitNetwork& net, const policy::SplitGradient& grad);
};

// Soft actor-critic with twin critics, polyak-averaged target critics and a
// log-parameterized, auto-tuned entropy temperature.
class SacAgent {
 public:
  SacAgent(policy::Actor actor, policy::Critic q1, policy::Critic q2,
           SacConfig config, uint64_t seed);

  // Fresh networks for `arch`. Relative networks get `anchors` attached;
  // throws ConfigError if they are required and missing.
  static SacAgent Create(const policy::ArchitectureConfig& arch, const policy::Dims& dims,
                         std::shared_ptr<const policy::AnchorSet> anchors,
                         SacConfig config, uint64_t seed);

  SacLosses Update(const TransitionBatch& batch);

  // Exploration actions sampled from the policy (no dropout).
  Eigen::MatrixXd SampleActions(const Eigen::MatrixXd& task_state,
                                const Eigen::MatrixXd& robot_state);
  Eigen::MatrixXd DeterministicActions(const Eigen::MatrixXd& task_state,
                                       const Eigen::MatrixXd& robot_state) const {
    return actor_.DeterministicAction(task_state, robot_state);
  }

  // Critic target y = r + gamma (1 - done) (min target Q(s', a') - alpha log pi(a'|s'))
  // for next actions drawn with `noise` (n x B).
  Eigen::VectorXd CriticTargets(const TransitionBatch& batch,
                                const Eigen::MatrixXd& noise) const;

  // mean(alpha log pi(a|s) - min Q(s, a)) with a drawn using `noise`, and
  // optionally its gradient w.r.t. the actor parameters.
  double ActorObjective(const TransitionBatch& batch, const Eigen::MatrixXd& noise,
                        const policy::ForwardOptions& options = {},
                        policy::SplitGradient* grad = nullptr,
                        Eigen::VectorXd* log_prob = nullptr) const;

  // Fresh Adam state for every module; targets are copied from the critics.
  void ResetOptimizers();
  void ResetAlpha(double alpha);

  const SacConfig& config() const { return config_; }
  SacConfig& mutable_config() { return config_; }
  const policy::Actor& actor() const { return actor_; }
  const policy::Critic& q1() const { return q1_; }
  const policy::Critic& q2() const { return q2_; }
  const policy::Critic& target_q1() const { return target_q1_; }
  const policy::Critic& target_q2() const { return target_q2_; }
  policy::Actor& mutable_actor() { return actor_; }
  policy::Critic& mutable_q1() { return q1_; }
  policy::Critic& mutable_q2() { return q2_; }
  double log_alpha() const { return log_alpha_(0); }
  double alpha() const { return std::exp(log_alpha_(0)); }
  void set_log_alpha(double v) { log_alpha_(0) = v; }
  double target_entropy() const;
  int64_t updates() const { return updates_; }
  Rng& rng() { return rng_; }

 private:
  SacConfig config_;
  policy::Actor actor_;
  policy::Critic q1_;
  policy::Critic q2_;
  policy::Critic target_q1_;
  policy::Critic target_q2_;
  NetworkOptimizer actor_opt_;
  NetworkOptimizer q1_opt_;
  NetworkOptimizer q2_opt_;
  nn::Adam alpha_opt_;
  Eigen::VectorXd log_alpha_;
  int64_t updates_ = 0;
  Rng rng_;
};

// Target <- tau * online + (1 - tau) * target, module by module.
void PolyakUpdate(const policy::SplitNetwork& online, policy::SplitNetwork& target,
                  double tau);

}  // namespace stitchkit::rl

#endif  // STITCHKIT_RL_SAC_H_
