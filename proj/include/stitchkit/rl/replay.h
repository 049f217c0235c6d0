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

#ifndef STITCHKIT_RL_REPLAY_H_
#define STITCHKIT_RL_REPLAY_H_

#include <cstdint>
#include <deque>
#include <vector>

#include <Eigen/Dense>

#include "stitchkit/nn/random.h"

namespace stitchkit::rl {

struct Transition {
  Eigen::VectorXd task;
  Eigen::VectorXd robot;
  Eigen::VectorXd action;
  double reward = -1.0;
  Eigen::VectorXd next_task;
  Eigen::VectorXd next_robot;
  Eigen::Vector2d achieved_goal = Eigen::Vector2d::Zero();  // after the step
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  // Terminal (success); time limits are not terminal.
  bool done = false;
};

// One complete episode of T steps. The goal occupies the last two rows of
// every task state.
struct Episode {
  Eigen::MatrixXd task;      // d_T x (T + 1)
  Eigen::MatrixXd robot;     // d_R x (T + 1)
  Eigen::MatrixXd action;    // n x T
  Eigen::MatrixXd achieved;  // 2 x T
  Eigen::VectorXd reward;    // T

  int length() const { return static_cast<int>(action.cols()); }
  Eigen::Vector2d goal() const;
  Transition At(int t) const;
  // Transition t with its goal replaced and reward/done recomputed.
  Transition Relabeled(int t, const Eigen::Vector2d& goal, double success_radius) const;
};

// The original transitions followed by k_relabel copies of each one whose
// goal is the achieved goal of a uniformly chosen step t' in [t, T - 1]
// ('future' strategy). Rewards are recomputed; done marks success.
std::vector<Transition> HerRelabel(const Episode& episode, int k_relabel,
                                   double success_radius, Rng& rng);

struct TransitionBatch {
  Eigen::MatrixXd task;
  Eigen::MatrixXd robot;
  Eigen::MatrixXd action;
  Eigen::VectorXd reward;
  Eigen::MatrixXd next_task;
  Eigen::MatrixXd next_robot;
  Eigen::VectorXd done;
  Eigen::MatrixXd achieved;
  Eigen::MatrixXd goal;

  int size() const { return static_cast<int>(reward.size()); }
};

TransitionBatch MakeBatch(const std::vector<Transition>& transitions);

// Stores whole episodes, evicting the oldest once more than `capacity`
// transitions are held. Sampling draws transitions uniformly and relabels
// each with probability k / (k + 1) using the 'future' strategy, which gives
// the same mixture as HerRelabel without materializing the copies.
class EpisodeBuffer {
 public:
  EpisodeBuffer(int64_t capacity, int k_relabel, double success_radius);

  void Add(Episode episode);
  int64_t size() const { return size_; }
  int num_episodes() const { return static_cast<int>(episodes_.size()); }
  const Episode& episode(int i) const { return episodes_[i]; }
  int64_t capacity() const { return capacity_; }

  TransitionBatch Sample(int batch_size, Rng& rng) const;

 private:
  int64_t capacity_;
  int k_relabel_;
  double success_radius_;
  std::deque<Episode> episodes_;
  std::vector<int64_t> ends_;  // prefix sums of episode lengths
  int64_t size_ = 0;
};

}  // namespace stitchkit::rl

#endif  // STITCHKIT_RL_REPLAY_H_
