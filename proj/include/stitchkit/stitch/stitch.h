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

#ifndef STITCHKIT_STITCH_STITCH_H_
#define STITCHKIT_STITCH_STITCH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stitchkit/envs/presets.h"
#include "stitchkit/io/checkpoint.h"
#include "stitchkit/policy/actor_critic.h"
#include "stitchkit/policy/network.h"
#include "stitchkit/rl/train.h"

namespace stitchkit::stitch {

// Task module (top half) of `task_source` followed by the robot module
// (bottom half) of `robot_source`. Throws IncompatibleError when the
// networks differ in kind, alignment or anchor set, and ShapeError when the
// interface widths or layer shapes do not meet.
policy::SplitNetwork StitchNetworks(const policy::SplitNetwork& task_source,
                                    const policy::SplitNetwork& robot_source);

policy::Actor StitchActor(const io::Checkpoint& task_source,
                          const io::Checkpoint& robot_source);
std::pair<policy::Critic, policy::Critic> StitchCritics(const io::Checkpoint& task_source,
                                                        const io::Checkpoint& robot_source);

// Checks both actor stitches and the target environment's dimensions
// without building anything.
void CheckCompatible(const io::Checkpoint& task_source, const io::Checkpoint& robot_source,
                     const envs::EnvSpec& target);

// Stitched actor and critics, temperature from the robot source, metadata
// flagged as stitched with both parents' hashes.
io::Checkpoint Stitch(const io::Checkpoint& task_source, const io::Checkpoint& robot_source,
                      const envs::EnvSpec& target);

struct MetricTable {
  std::vector<rl::EvalResult> repeats;
  double success_mean = 0.0;
  double success_std = 0.0;  // sample standard deviation over repeats
  double touching_mean = 0.0;
  double touching_std = 0.0;

  nlohmann::json ToJson() const;
  std::string ToText() const;
};

MetricTable Summarize(std::vector<rl::EvalResult> repeats);

// Deterministic evaluation of `actor`, `repeats` times with n_episodes
// each; repeat r uses seed MixSeed(seed, r).
MetricTable ZeroShotEval(const policy::Actor& actor, const envs::EnvSpec& env,
                         int n_episodes, int repeats, uint64_t seed, int threads = 1);

struct FinetuneResult {
  io::Checkpoint checkpoint;
  std::vector<rl::EpochMetrics> metrics;
};

// Warm-fills the replay buffer with the stitched policy
// (config.warmfill_epochs), resets the temperature to sac.initial_alpha and
// fine-tunes with SAC for config.epochs. Zero epochs return `stitched`
// unchanged.
FinetuneResult FewShotFinetune(const io::Checkpoint& stitched, const envs::EnvSpec& env,
                               const rl::SacConfig& sac, const rl::TrainConfig& config,
                               uint64_t seed, const rl::EpochCallback& on_epoch = {});

}  // namespace stitchkit::stitch

#endif  // STITCHKIT_STITCH_STITCH_H_
