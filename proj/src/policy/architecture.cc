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

#include "stitchkit/policy/architecture.h"

#include "stitchkit/errors.h"

namespace stitchkit::policy {
namespace {

std::vector<int> PresetHidden(SizePreset size) {
  return size == SizePreset::kFull ? std::vector<int>{256, 256, 256}
                                   : std::vector<int>{64, 64};
}

NetworkSpec BaseSpec(const ArchitectureConfig& arch, int task_dim, int extra_dim,
                     int output_dim, bool aligned, const std::string& anchor_hash) {
  NetworkSpec spec;
  spec.task_dim = task_dim;
  spec.extra_dim = extra_dim;
  spec.output_dim = output_dim;
  const std::vector<int> hidden = PresetHidden(arch.size);
  const int latent = PresetLatentDim(arch.size);
  switch (arch.method) {
    case Method::kPlain: {
      spec.kind = NetworkKind::kPlain;
      spec.plain_hidden = hidden;
      spec.plain_hidden.push_back(latent);
      spec.plain_hidden.insert(spec.plain_hidden.end(), hidden.begin(), hidden.end());
      // After hidden layer ceil(depth / 2).
      spec.split_layer = (static_cast<int>(spec.plain_hidden.size()) + 1) / 2;
      break;
    }
    case Method::kPs:
    case Method::kAblation:
    case Method::kDevin:
      spec.kind = NetworkKind::kModular;
      spec.task_hidden = hidden;
      spec.robot_hidden = hidden;
      spec.latent_dim = latent;
      spec.alignment = Alignment::kNone;
      if (arch.method == Method::kPs && aligned) {
        spec.alignment = Alignment::kRelative;
        spec.anchor_hash = anchor_hash;
        spec.anchor_stop_gradient = arch.anchor_stop_gradient;
      }
      if (arch.method == Method::kDevin) {
        if (arch.devin_bottleneck <= 0 || arch.devin_bottleneck >= latent) {
          throw ConfigError("devin bottleneck must be positive and below the "
                            "preset latent width");
        }
        spec.latent_dim = arch.devin_bottleneck;
        spec.dropout = arch.devin_dropout;
      }
      break;
  }
  spec.Validate();
  return spec;
}

}  // namespace

std::string MethodName(Method method) {
  switch (method) {
    case Method::kPs:
      return "ps";
    case Method::kAblation:
      return "ablation";
    case Method::kDevin:
      return "devin";
    case Method::kPlain:
      return "plain";
  }
  return "ps";
}

Method ParseMethod(const std::string& name) {
  if (name == "ps") return Method::kPs;
  if (name == "ablation") return Method::kAblation;
  if (name == "devin") return Method::kDevin;
  if (name == "plain") return Method::kPlain;
  throw ConfigError("unknown method '" + name + "' (ps, ablation, devin, plain)");
}

std::string SizeName(SizePreset size) {
  switch (size) {
    case SizePreset::kSmall:
      return "small";
    case SizePreset::kMedium:
      return "medium";
    case SizePreset::kLarge:
      return "large";
    case SizePreset::kFull:
      return "full";
  }
  return "medium";
}

SizePreset ParseSize(const std::string& name) {
  if (name == "small") return SizePreset::kSmall;
  if (name == "medium") return SizePreset::kMedium;
  if (name == "large") return SizePreset::kLarge;
  if (name == "full") return SizePreset::kFull;
  throw ConfigError("unknown size preset '" + name + "'");
}

int PresetLatentDim(SizePreset size) {
  switch (size) {
    case SizePreset::kSmall:
      return 3;
    case SizePreset::kMedium:
      return 16;
    case SizePreset::kLarge:
      return 64;
    case SizePreset::kFull:
      return 128;
  }
  return 16;
}

NetworkSpec ActorSpec(const ArchitectureConfig& arch, const Dims& dims,
                      const std::string& anchor_hash) {
  return BaseSpec(arch, dims.task_dim, dims.robot_dim, 2 * dims.action_dim, true,
                  anchor_hash);
}

NetworkSpec CriticSpec(const ArchitectureConfig& arch, const Dims& dims,
                       const std::string& anchor_hash) {
  return BaseSpec(arch, dims.task_dim, dims.robot_dim + dims.action_dim, 1,
                  arch.critic_alignment, anchor_hash);
}

}  // namespace stitchkit::policy
