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

#ifndef STITCHKIT_ENVS_ROLLOUT_H_
#define STITCHKIT_ENVS_ROLLOUT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stitchkit/envs/planar_arm.h"
#include "stitchkit/envs/presets.h"

namespace stitchkit::envs {

// Batched deterministic policy: task states (d_T x B) and robot states
// (d_R x B) to actions (n x B).
using BatchPolicy =
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>;

struct EpisodeSummary {
  bool success = false;
  bool touched = false;  // touched flag set on at least one step
  int steps = 0;
};

struct StepRecord {
  int episode = 0;
  int t = 0;
  const EnvState* state = nullptr;  // before the step
  const Eigen::VectorXd* action = nullptr;
  const StepOutcome* outcome = nullptr;
  const PlanarArmEnv* env = nullptr;  // after the step
};

// Seed of episode `index` in a run seeded with `seed`.
uint64_t EpisodeSeed(uint64_t seed, int index);

// Runs one episode per seed. Episodes advance in lockstep groups of fixed
// size so the policy sees batched inputs; results do not depend on
// `threads`. `on_step` is called in (episode, t) order.
std::vector<EpisodeSummary> RunEpisodes(
    const EnvSpec& spec, const BatchPolicy& policy, std::span<const uint64_t> seeds,
    const std::function<void(const StepRecord&)>& on_step = {}, int threads = 1);

// Evaluation parallelism cap from STITCHKIT_THREADS (default 1).
int EvalThreads();

}  // namespace stitchkit::envs

#endif  // STITCHKIT_ENVS_ROLLOUT_H_
