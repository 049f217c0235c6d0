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

#ifndef STITCHKIT_IO_RUN_CONFIG_H_
#define STITCHKIT_IO_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "stitchkit/policy/architecture.h"
#include "stitchkit/rl/sac.h"
#include "stitchkit/rl/train.h"

namespace stitchkit::io {

inline constexpr int kRunConfigSchema = 1;

// Everything a training run depends on. Parsed from YAML with a strict
// schema: unknown keys, wrong types and missing files are ConfigErrors that
// name the offending line.
struct RunConfig {
  std::string env_id = "reach-r2";
  uint64_t seed = 0;
  policy::ArchitectureConfig architecture;
  rl::SacConfig sac;
  rl::TrainConfig training;
  std::filesystem::path anchors;          // required for relative alignment
  std::filesystem::path init_checkpoint;  // optional warm start

  // Checks values and that referenced files exist.
  void Validate() const;
  // Canonical form; keys are sorted so the hash ignores formatting.
  nlohmann::json ToJson() const;
  std::string ToYaml() const;
  // SHA-256 of the canonical form without the seed.
  std::string Hash() const;
};

// Relative paths in the file resolve against the file's directory.
RunConfig LoadRunConfig(const std::filesystem::path& path);
RunConfig ParseRunConfig(const std::string& text,
                         const std::filesystem::path& base_dir = {},
                         const std::string& origin = "config");

// Named starting points ("desk-reach", "desk-push", "smoke").
RunConfig PresetRunConfig(const std::string& name);

}  // namespace stitchkit::io

#endif  // STITCHKIT_IO_RUN_CONFIG_H_
