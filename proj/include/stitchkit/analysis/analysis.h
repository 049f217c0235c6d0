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

#ifndef STITCHKIT_ANALYSIS_ANALYSIS_H_
#define STITCHKIT_ANALYSIS_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "stitchkit/envs/presets.h"
#include "stitchkit/policy/actor_critic.h"
#include "stitchkit/policy/network.h"

namespace stitchkit::analysis {

// States visited by deterministic rollouts of `actor`, one column per
// pre-step state, taken from episodes EpisodeSeed(seed, 0), (seed, 1), ...
// until n_states are collected.
struct StateSample {
  Eigen::MatrixXd task;      // d_T x n
  Eigen::MatrixXd robot;     // d_R x n
  Eigen::MatrixXd end_effector;  // 2 x n
};
StateSample RolloutStates(const policy::Actor& actor, const envs::EnvSpec& env, int n_states,
                          uint64_t seed);

enum class LatentStage {
  kEmbedding,  // task module output, before any alignment
  kInterface,  // robot module input latent (after alignment)
};

// Latents of a network's task side for the given task states. Only the task
// module is involved, so networks for different robots can be compared.
Eigen::MatrixXd TaskLatents(const policy::SplitNetwork& net, const Eigen::MatrixXd& task_states,
                            LatentStage stage = LatentStage::kInterface);

struct LatentDump {
  Eigen::MatrixXd task_states;  // d_T x n
  Eigen::MatrixXd latents;      // L x n
  std::vector<int> labels;      // goal quadrant 0..3

  int size() const { return static_cast<int>(labels.size()); }
};

LatentDump CollectLatents(const policy::Actor& actor, const envs::EnvSpec& env, int n_states,
                          uint64_t seed);

struct PcaResult {
  Eigen::MatrixXd projection;   // out_dims x n
  Eigen::MatrixXd components;   // d x out_dims, orthonormal columns
  Eigen::VectorXd mean;         // d
  Eigen::VectorXd explained_variance_ratio;  // out_dims, NaN when degenerate
  bool degenerate = false;      // all samples equal
};

// Principal components of the columns of x (d x n) via SVD of the centered
// data. Each axis is signed so its largest-magnitude entry is positive.
// Throws ShapeError unless n > out_dims and out_dims <= d.
PcaResult PcaProject(const Eigen::MatrixXd& x, int out_dims);

struct DistanceReport {
  double mean_cosine = 0.0;  // mean of 1 - cos(a_i, b_i), in [0, 2]
  double mean_l2 = 0.0;      // mean of ||a_i - b_i||
  int samples = 0;
  // For comparisons of more than two networks: symmetric, zero diagonal.
  Eigen::MatrixXd cosine_matrix;
  Eigen::MatrixXd l2_matrix;

  std::string ToText() const;
  nlohmann::json ToJson() const;
};

// Column-wise comparison of two latent matrices of equal shape. A zero
// vector has cosine similarity 0 with anything except another zero vector.
DistanceReport PairwiseDistances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
// All pairs; the means are averages over the off-diagonal pairs.
DistanceReport PairwiseDistances(const std::vector<Eigen::MatrixXd>& latents);

struct RegressionOptions {
  int hidden = 64;
  int epochs = 200;
  double learning_rate = 1e-3;
  int batch_size = 0;  // 0: full batch
  double train_fraction = 0.8;
  double success_radius = 0.05;
};

struct TargetScore {
  std::string name;
  double r2 = 0.0;
  double success_rate = 0.0;
};

struct RegressionReport {
  std::vector<TargetScore> targets;
  int train_size = 0;
  int test_size = 0;

  const TargetScore& Get(const std::string& name) const;
  std::string ToText() const;
  nlohmann::json ToJson() const;
};

// Fits a 3-layer relu regressor from features (f x n) to each labeled
// target (2 x n) on a seeded train/test split and scores it on the test set.
RegressionReport FitRegression(const Eigen::MatrixXd& features,
                               const std::vector<std::pair<std::string, Eigen::MatrixXd>>& targets,
                               uint64_t seed, const RegressionOptions& options = {});

// Robot-module last-hidden-layer activations of `actor` over its own
// rollouts, regressed onto the object (push tasks), goal and end-effector
// positions. Throws ConfigError if n_points < 10.
RegressionReport RegressionProbe(const policy::Actor& actor, const envs::EnvSpec& env,
                                 int n_points, uint64_t seed,
                                 const RegressionOptions& options = {});

// Comma-separated export: index,label,task_0..,latent_0..[,pc_0..].
std::string LatentCsv(const LatentDump& dump, const Eigen::MatrixXd* projection = nullptr);

}  // namespace stitchkit::analysis

#endif  // STITCHKIT_ANALYSIS_ANALYSIS_H_
