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

#include "stitchkit/stitch/stitch.h"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "stitchkit/errors.h"

namespace stitchkit::stitch {
namespace {

using policy::Alignment;
using policy::NetworkKind;
using policy::NetworkSpec;
using policy::SplitNetwork;

void CheckPair(const NetworkSpec& t, const NetworkSpec& r, const std::string& what) {
  if (t.kind != r.kind) {
    throw IncompatibleError(what + ": cannot stitch a plain network with a modular one");
  }
  if (t.hidden_activation != r.hidden_activation) {
    throw IncompatibleError(what + ": hidden activations differ");
  }
  if (t.kind == NetworkKind::kPlain) {
    if (t.split_layer != r.split_layer) {
      throw ShapeError(what + ": plain networks are split at different layers");
    }
    if (t.interface_dim() != r.interface_dim()) {
      throw ShapeError(what + ": top and bottom halves have different interface widths");
    }
    if (t.task_dim + t.extra_dim != r.task_dim + r.extra_dim) {
      throw ShapeError(what + ": plain inputs have different widths");
    }
    return;
  }
  if (t.alignment != r.alignment) {
    throw IncompatibleError(what + ": alignment modes differ (" + policy::AlignmentName(t.alignment) +
                            " vs " + policy::AlignmentName(r.alignment) + ")");
  }
  if (t.alignment == Alignment::kRelative && t.anchor_hash != r.anchor_hash) {
    throw IncompatibleError(what + ": anchor sets differ (" + t.anchor_hash.substr(0, 12) +
                            " vs " + r.anchor_hash.substr(0, 12) + ")");
  }
  if (t.interface_dim() != r.interface_dim()) {
    throw ShapeError(what + ": interface widths differ (" + std::to_string(t.interface_dim()) +
                     " vs " + std::to_string(r.interface_dim()) + ")");
  }
}

NetworkSpec Combine(const NetworkSpec& t, const NetworkSpec& r) {
  NetworkSpec s = r;
  if (t.kind == NetworkKind::kPlain) {
    // The top half owns the first split_layer hidden widths.
    s.plain_hidden.assign(t.plain_hidden.begin(), t.plain_hidden.begin() + t.split_layer);
    s.plain_hidden.insert(s.plain_hidden.end(), r.plain_hidden.begin() + r.split_layer,
                          r.plain_hidden.end());
    return s;
  }
  s.task_dim = t.task_dim;
  s.task_hidden = t.task_hidden;
  s.latent_dim = t.latent_dim;
  s.alignment = t.alignment;
  s.normalize = t.normalize;
  s.dropout = t.dropout;
  s.anchor_stop_gradient = t.anchor_stop_gradient;
  s.anchor_hash = t.anchor_hash;
  return s;
}

double SampleStd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

SplitNetwork StitchNetworks(const SplitNetwork& task_source, const SplitNetwork& robot_source) {
  CheckPair(task_source.spec(), robot_source.spec(), "stitch");
  SplitNetwork out(Combine(task_source.spec(), robot_source.spec()),
                   task_source.task_module(), robot_source.robot_module());
  if (task_source.anchors() != nullptr) out.AttachAnchors(task_source.anchors());
  return out;
}

policy::Actor StitchActor(const io::Checkpoint& task_source, const io::Checkpoint& robot_source) {
  return policy::Actor(
      StitchNetworks(task_source.actor.network(), robot_source.actor.network()));
}

std::pair<policy::Critic, policy::Critic> StitchCritics(const io::Checkpoint& task_source,
                                                        const io::Checkpoint& robot_source) {
  return {policy::Critic(StitchNetworks(task_source.q1.network(), robot_source.q1.network())),
          policy::Critic(StitchNetworks(task_source.q2.network(), robot_source.q2.network()))};
}

void CheckCompatible(const io::Checkpoint& task_source, const io::Checkpoint& robot_source,
                     const envs::EnvSpec& target) {
  const NetworkSpec& t = task_source.actor.network().spec();
  const NetworkSpec& r = robot_source.actor.network().spec();
  CheckPair(t, r, "actor");
  CheckPair(task_source.q1.network().spec(), robot_source.q1.network().spec(), "critic");
  const int task_dim = envs::TaskStateDim(target.task.kind);
  const int robot_dim = target.robot.n_joints();
  if (t.kind == NetworkKind::kModular) {
    if (t.task_dim != task_dim) {
      throw ShapeError("task source expects task states of width " + std::to_string(t.task_dim) +
                       ", " + target.id + " has " + std::to_string(task_dim));
    }
    if (r.extra_dim != robot_dim) {
      throw ShapeError("robot source expects " + std::to_string(r.extra_dim) + " joints, " +
                       target.id + " has " + std::to_string(robot_dim));
    }
  } else if (t.task_dim != task_dim || t.extra_dim != robot_dim || r.task_dim != task_dim ||
             r.extra_dim != robot_dim) {
    throw ShapeError("plain sources do not match the state widths of " + target.id);
  }
}

io::Checkpoint Stitch(const io::Checkpoint& task_source, const io::Checkpoint& robot_source,
                      const envs::EnvSpec& target) {
  CheckCompatible(task_source, robot_source, target);
  io::Checkpoint c;
  c.actor = StitchActor(task_source, robot_source);
  std::tie(c.q1, c.q2) = StitchCritics(task_source, robot_source);
  c.log_alpha = robot_source.log_alpha;
  c.anchors = task_source.anchors;
  c.metadata = {{"stitched", true},
                {"env_id", target.id},
                {"task_parent", io::CheckpointHash(task_source)},
                {"robot_parent", io::CheckpointHash(robot_source)},
                {"task_parent_env", task_source.metadata.value("env_id", "")},
                {"robot_parent_env", robot_source.metadata.value("env_id", "")},
                {"method", task_source.metadata.value("method", "")}};
  return c;
}

nlohmann::json MetricTable::ToJson() const {
  nlohmann::json reps = nlohmann::json::array();
  for (const rl::EvalResult& r : repeats) {
    reps.push_back({{"success_rate", r.success_rate},
                    {"touching_rate", r.touching_rate},
                    {"episodes", r.episodes}});
  }
  return {{"success_mean", success_mean},
          {"success_std", success_std},
          {"touching_mean", touching_mean},
          {"touching_std", touching_std},
          {"repeats", reps}};
}

std::string MetricTable::ToText() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "metric      mean    std   (%, " << repeats.size() << " repeats)\n";
  os << "success   " << std::setw(6) << 100.0 * success_mean << " " << std::setw(6)
     << 100.0 * success_std << "\n";
  os << "touching  " << std::setw(6) << 100.0 * touching_mean << " " << std::setw(6)
     << 100.0 * touching_std << "\n";
  return os.str();
}

MetricTable Summarize(std::vector<rl::EvalResult> repeats) {
  MetricTable t;
  t.repeats = std::move(repeats);
  std::vector<double> s;
  std::vector<double> h;
  for (const rl::EvalResult& r : t.repeats) {
    s.push_back(r.success_rate);
    h.push_back(r.touching_rate);
  }
  if (s.empty()) return t;
  for (double v : s) t.success_mean += v / static_cast<double>(s.size());
  for (double v : h) t.touching_mean += v / static_cast<double>(h.size());
  t.success_std = SampleStd(s, t.success_mean);
  t.touching_std = SampleStd(h, t.touching_mean);
  return t;
}

MetricTable ZeroShotEval(const policy::Actor& actor, const envs::EnvSpec& env, int n_episodes,
                         int repeats, uint64_t seed, int threads) {
  if (repeats <= 0) throw UsageError("repeats must be positive");
  const envs::BatchPolicy policy = [&actor](const Eigen::MatrixXd& t, const Eigen::MatrixXd& r) {
    return actor.DeterministicAction(t, r);
  };
  std::vector<rl::EvalResult> results;
  for (int i = 0; i < repeats; ++i) {
    results.push_back(rl::Evaluate(policy, env, n_episodes, MixSeed(seed, i), threads));
  }
  return Summarize(std::move(results));
}

FinetuneResult FewShotFinetune(const io::Checkpoint& stitched, const envs::EnvSpec& env,
                               const rl::SacConfig& sac, const rl::TrainConfig& config,
                               uint64_t seed, const rl::EpochCallback& on_epoch) {
  FinetuneResult result;
  if (config.epochs == 0) {
    result.checkpoint = stitched;
    return result;
  }
  rl::SacAgent agent = io::ToAgent(stitched, sac, seed);
  agent.ResetAlpha(sac.initial_alpha);
  result.metrics = rl::Train(agent, env, config, seed, on_epoch);
  nlohmann::json meta = stitched.metadata;
  meta["finetuned_epochs"] = config.epochs;
  meta["finetune_seed"] = seed;
  result.checkpoint = io::FromAgent(agent, meta);
  return result;
}

}  // namespace stitchkit::stitch
