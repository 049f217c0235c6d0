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

#ifndef STITCHKIT_POLICY_ARCHITECTURE_H_
#define STITCHKIT_POLICY_ARCHITECTURE_H_

#include <string>

#include "stitchkit/policy/network.h"

namespace stitchkit::policy {

// PS: modular + relative alignment. Ablation: modular, no alignment.
// Devin: modular with a small bottleneck and dropout. Plain: one MLP split
// into top and bottom halves.
enum class Method { kPs, kAblation, kDevin, kPlain };

// small/medium/large: 2x64 task and robot hidden layers with latent 3/16/64.
// full: 3x256 hidden layers (four layers per module) with latent 128.
enum class SizePreset { kSmall, kMedium, kLarge, kFull };

std::string MethodName(Method method);
Method ParseMethod(const std::string& name);
std::string SizeName(SizePreset size);
SizePreset ParseSize(const std::string& name);

struct ArchitectureConfig {
  Method method = Method::kPs;
  SizePreset size = SizePreset::kMedium;
  int devin_bottleneck = 4;
  double devin_dropout = 0.1;
  // Whether critics use the relative representation too (PS only).
  bool critic_alignment = true;
  bool anchor_stop_gradient = false;
};

struct Dims {
  int task_dim = 0;
  int robot_dim = 0;
  int action_dim = 0;
};

NetworkSpec ActorSpec(const ArchitectureConfig& arch, const Dims& dims,
                      const std::string& anchor_hash);
NetworkSpec CriticSpec(const ArchitectureConfig& arch, const Dims& dims,
                       const std::string& anchor_hash);

// Latent width of the preset (k for PS).
int PresetLatentDim(SizePreset size);

}  // namespace stitchkit::policy

#endif  // STITCHKIT_POLICY_ARCHITECTURE_H_
