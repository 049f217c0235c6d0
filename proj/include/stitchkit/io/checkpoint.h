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

#ifndef STITCHKIT_IO_CHECKPOINT_H_
#define STITCHKIT_IO_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stitchkit/policy/actor_critic.h"
#include "stitchkit/policy/anchor_set.h"
#include "stitchkit/rl/sac.h"

namespace stitchkit::io {

// A self-describing policy snapshot: network specs, embedded anchors, and
// parameters. Target critics and optimizer state are not stored.
struct Checkpoint {
  policy::Actor actor;
  policy::Critic q1;
  policy::Critic q2;
  double log_alpha = 0.0;
  std::shared_ptr<const policy::AnchorSet> anchors;
  // Free-form training metadata: env_id, seed, epoch, method, stitched,
  // parents, ...
  nlohmann::json metadata = nlohmann::json::object();
};

// Layout (all integers and floats little-endian):
//   "SKCHKPT\0", u32 version,
//   u64 n, n bytes of JSON header (specs, module table, metadata),
//   u64 m, m bytes of AnchorSet::Serialize() (m = 0 without anchors),
//   f64 parameters of every module in header order, then log_alpha,
//   64 hex characters: SHA-256 of everything before.
std::vector<uint8_t> SerializeCheckpoint(const Checkpoint& checkpoint);
// Throws ConfigError on corrupt or unsupported input.
Checkpoint DeserializeCheckpoint(std::span<const uint8_t> bytes,
                                 const std::string& origin = "checkpoint");

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Snapshot of an agent's online networks and temperature. Anchors are taken
// from whichever network has them attached.
Checkpoint FromAgent(const rl::SacAgent& agent, nlohmann::json metadata = nlohmann::json::object());
// Agent initialized from the checkpoint; targets start as copies of the
// critics and optimizers are fresh.
rl::SacAgent ToAgent(const Checkpoint& checkpoint, const rl::SacConfig& config, uint64_t seed);

// Hash of the serialized checkpoint (the trailing digest).
std::string CheckpointHash(const Checkpoint& checkpoint);

}  // namespace stitchkit::io

#endif  // STITCHKIT_IO_CHECKPOINT_H_
