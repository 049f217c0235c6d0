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

#ifndef STITCHKIT_POLICY_ACTOR_CRITIC_H_
#define STITCHKIT_POLICY_ACTOR_CRITIC_H_

#include <Eigen/Dense>

#include "stitchkit/nn/random.h"
#include "stitchkit/policy/network.h"

namespace stitchkit::policy {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct ActorTape {
  SplitTape network;
  Eigen::MatrixXd raw_log_std;
};

struct GaussianHead {
  Eigen::MatrixXd mean;     // n_action x B
  Eigen::MatrixXd log_std;  // clamped, n_action x B
};

// Gaussian policy head on a split network: output rows [0, n) are the mean,
// rows [n, 2n) the log standard deviation.
class Actor {
 public:
  Actor() = default;
  explicit Actor(SplitNetwork network);

  const SplitNetwork& network() const { return network_; }
  SplitNetwork& network() { return network_; }
  int action_dim() const { return action_dim_; }

  GaussianHead Forward(const Eigen::MatrixXd& task_state,
                       const Eigen::MatrixXd& robot_state,
                       const ForwardOptions& options = {},
                       ActorTape* tape = nullptr) const;
  // Gradients w.r.t. mean and clamped log_std; entries whose log_std was
  // clamped receive no gradient.
  SplitGradient Backward(ActorTape& tape, const Eigen::MatrixXd& grad_mean,
                         const Eigen::MatrixXd& grad_log_std) const;

  // tanh(mean) for a batch; the action used for evaluation.
  Eigen::MatrixXd DeterministicAction(const Eigen::MatrixXd& task_state,
                                      const Eigen::MatrixXd& robot_state) const;

 private:
  SplitNetwork network_;
  int action_dim_ = 0;
};

// Q(s_T, s_R, a) with extra input s_R ++ a.
class Critic {
 public:
  Critic() = default;
  explicit Critic(SplitNetwork network);

  const SplitNetwork& network() const { return network_; }
  SplitNetwork& network() { return network_; }
  // Returns 1 x B.
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& task_state,
                          const Eigen::MatrixXd& robot_state,
                          const Eigen::MatrixXd& action,
                          SplitTape* tape = nullptr,
                          const ForwardOptions& options = {}) const;
  // The extra gradient holds d/ds_R in the first rows and d/da below.
  SplitGradient Backward(SplitTape& tape, const Eigen::MatrixXd& grad_q) const;

 private:
  SplitNetwork network_;
};

struct SquashedSample {
  Eigen::MatrixXd action;    // tanh(pre_tanh), n x B
  Eigen::MatrixXd pre_tanh;  // mean + std * noise
  Eigen::MatrixXd noise;     // standard normal draws
  Eigen::VectorXd log_prob;  // B
};

// a = tanh(mean + exp(log_std) * noise) with the change-of-variables log
// density. Zero noise gives the deterministic action tanh(mean).
SquashedSample SquashedGaussian(const Eigen::MatrixXd& mean,
                                const Eigen::MatrixXd& log_std,
                                const Eigen::MatrixXd& noise);
SquashedSample SampleAction(const Eigen::MatrixXd& mean,
                            const Eigen::MatrixXd& log_std, Rng& rng,
                            bool deterministic = false);

// Log density of an already squashed action, |a| < 1.
Eigen::VectorXd SquashedLogProb(const Eigen::MatrixXd& mean,
                                const Eigen::MatrixXd& log_std,
                                const Eigen::MatrixXd& action);

// Backpropagates d/d action and d/d log_prob through the reparameterized
// sample (noise held fixed).
void SquashedGaussianBackward(const SquashedSample& sample,
                              const Eigen::MatrixXd& log_std,
                              const Eigen::MatrixXd& grad_action,
                              const Eigen::VectorXd& grad_log_prob,
                              Eigen::MatrixXd* grad_mean,
                              Eigen::MatrixXd* grad_log_std);

}  // namespace stitchkit::policy

#endif  // STITCHKIT_POLICY_ACTOR_CRITIC_H_
