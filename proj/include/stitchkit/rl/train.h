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

#ifndef STITCHKIT_RL_TRAIN_H_
#define STITCHKIT_RL_TRAIN_H_

#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "stitchkit/envs/presets.h"
#include "stitchkit/envs/rollout.h"
#include "stitchkit/rl/replay.h"
#include "stitchkit/rl/sac.h"

namespace stitchkit::rl {

struct EvalResult {
  double success_rate = 0.0;
  double touching_rate = 0.0;
  int episodes = 0;
};

// Deterministic-action rollouts on EpisodeSeed(seed, 0..n-1). Throws
// UsageError if n_episodes <= 0.
EvalResult Evaluate(const envs::BatchPolicy& policy, const envs::EnvSpec& env,
                    int n_episodes, uint64_t seed, int threads = 1);

// One epoch = cycles x (episodes_per_cycle rollouts + updates_per_cycle SAC
// updates), followed by an evaluation.
struct TrainConfig {
  int epochs = 150;
  int cycles_per_epoch = 10;
  int episodes_per_cycle = 2;
  int updates_per_cycle = 40;
  int eval_episodes = 50;
  int64_t buffer_capacity = 100000;
  int k_relabel = 4;
  // Episodes with uniform random actions before the first epoch.
  int random_episodes = 0;
  // Epochs of rollouts with the current policy and no updates, before the
  // first logged epoch.
  int warmfill_epochs = 0;
  int eval_threads = 1;

  void Validate() const;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  int64_t env_steps = 0;
  int64_t updates = 0;
  double success_rate = 0.0;
  double touching_rate = 0.0;
  double train_success_rate = 0.0;
  SacLosses losses;  // means over the epoch's updates

  nlohmann::json ToJson() const;
  static EpochMetrics FromJson(const nlohmann::json& j);
};

bool operator==(const EpochMetrics& a, const EpochMetrics& b);

// Records one episode of `policy` (stochastic or not) from `seed`.
Episode CollectEpisode(const envs::EnvSpec& env, const envs::BatchPolicy& policy,
                       uint64_t seed, envs::EpisodeSummary* summary = nullptr);

using EpochCallback = std::function<void(const EpochMetrics&, const SacAgent&)>;

// Trains `agent` in place. Every random stream derives from `seed`.
std::vector<EpochMetrics> Train(SacAgent& agent, const envs::EnvSpec& env,
                                const TrainConfig& config, uint64_t seed,
                                const EpochCallback& on_epoch = {});

}  // namespace stitchkit::rl

#endif  // STITCHKIT_RL_TRAIN_H_
