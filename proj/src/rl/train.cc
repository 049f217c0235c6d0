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

#include "stitchkit/rl/train.h"

#include <utility>

#include "stitchkit/errors.h"

namespace stitchkit::rl {
namespace {

constexpr uint64_t kTrainStream = 0x7a1;
constexpr uint64_t kEvalStream = 0xe7a;
constexpr uint64_t kRandomStream = 0x4a2d;

void Accumulate(SacLosses& sum, const SacLosses& l) {
  sum.q1 += l.q1;
  sum.q2 += l.q2;
  sum.actor += l.actor;
  sum.alpha_loss += l.alpha_loss;
  sum.entropy += l.entropy;
}

}  // namespace

EvalResult Evaluate(const envs::BatchPolicy& policy, const envs::EnvSpec& env,
                    int n_episodes, uint64_t seed, int threads) {
  if (n_episodes <= 0) throw UsageError("evaluation needs at least one episode");
  std::vector<uint64_t> seeds(n_episodes);
  for (int i = 0; i < n_episodes; ++i) seeds[i] = envs::EpisodeSeed(seed, i);
  const std::vector<envs::EpisodeSummary> runs =
      envs::RunEpisodes(env, policy, seeds, {}, threads);
  EvalResult r;
  r.episodes = n_episodes;
  for (const envs::EpisodeSummary& s : runs) {
    r.success_rate += s.success ? 1.0 : 0.0;
    r.touching_rate += s.touched ? 1.0 : 0.0;
  }
  r.success_rate /= n_episodes;
  r.touching_rate /= n_episodes;
  return r;
}

void TrainConfig::Validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (cycles_per_epoch <= 0) throw ConfigError("cycles_per_epoch must be positive");
  if (episodes_per_cycle <= 0) throw ConfigError("episodes_per_cycle must be positive");
  if (updates_per_cycle < 0) throw ConfigError("updates_per_cycle must be >= 0");
  if (eval_episodes <= 0) throw ConfigError("eval_episodes must be positive");
  if (buffer_capacity <= 0) throw ConfigError("buffer_capacity must be positive");
  if (k_relabel < 0) throw ConfigError("k_relabel must be >= 0");
  if (random_episodes < 0) throw ConfigError("random_episodes must be >= 0");
  if (warmfill_epochs < 0) throw ConfigError("warmfill_epochs must be >= 0");
  if (eval_threads <= 0) throw ConfigError("eval_threads must be positive");
}

nlohmann::json EpochMetrics::ToJson() const {
  return {{"epoch", epoch},
          {"env_steps", env_steps},
          {"updates", updates},
          {"success_rate", success_rate},
          {"touching_rate", touching_rate},
          {"train_success_rate", train_success_rate},
          {"q1_loss", losses.q1},
          {"q2_loss", losses.q2},
          {"actor_loss", losses.actor},
          {"alpha_loss", losses.alpha_loss},
          {"alpha", losses.alpha},
          {"entropy", losses.entropy}};
}

EpochMetrics EpochMetrics::FromJson(const nlohmann::json& j) {
  EpochMetrics m;
  m.epoch = j.at("epoch").get<int>();
  m.env_steps = j.at("env_steps").get<int64_t>();
  m.updates = j.at("updates").get<int64_t>();
  m.success_rate = j.at("success_rate").get<double>();
  m.touching_rate = j.at("touching_rate").get<double>();
  m.train_success_rate = j.at("train_success_rate").get<double>();
  m.losses.q1 = j.at("q1_loss").get<double>();
  m.losses.q2 = j.at("q2_loss").get<double>();
  m.losses.actor = j.at("actor_loss").get<double>();
  m.losses.alpha_loss = j.at("alpha_loss").get<double>();
  m.losses.alpha = j.at("alpha").get<double>();
  m.losses.entropy = j.at("entropy").get<double>();
  return m;
}

bool operator==(const EpochMetrics& a, const EpochMetrics& b) {
  return a.ToJson() == b.ToJson();
}

Episode CollectEpisode(const envs::EnvSpec& env, const envs::BatchPolicy& policy,
                       uint64_t seed, envs::EpisodeSummary* summary) {
  std::vector<Eigen::VectorXd> task;
  std::vector<Eigen::VectorXd> robot;
  std::vector<Eigen::VectorXd> action;
  std::vector<Eigen::Vector2d> achieved;
  std::vector<double> reward;
  const uint64_t seeds[] = {seed};
  std::vector<envs::EpisodeSummary> runs = envs::RunEpisodes(
      env, policy, seeds, [&](const envs::StepRecord& rec) {
        if (rec.t == 0) {
          task.push_back(rec.state->task_state);
          robot.push_back(rec.state->robot_state);
        }
        action.push_back(*rec.action);
        achieved.push_back(rec.outcome->achieved_goal);
        reward.push_back(rec.outcome->reward);
        task.push_back(rec.outcome->next_state.task_state);
        robot.push_back(rec.outcome->next_state.robot_state);
      });
  if (summary != nullptr) *summary = runs.front();
  const int steps = static_cast<int>(action.size());
  Episode ep;
  ep.task.resize(task.front().size(), steps + 1);
  ep.robot.resize(robot.front().size(), steps + 1);
  ep.action.resize(action.front().size(), steps);
  ep.achieved.resize(2, steps);
  ep.reward.resize(steps);
  for (int t = 0; t <= steps; ++t) {
    ep.task.col(t) = task[t];
    ep.robot.col(t) = robot[t];
  }
  for (int t = 0; t < steps; ++t) {
    ep.action.col(t) = action[t];
    ep.achieved.col(t) = achieved[t];
    ep.reward(t) = reward[t];
  }
  return ep;
}

std::vector<EpochMetrics> Train(SacAgent& agent, const envs::EnvSpec& env,
                                const TrainConfig& config, uint64_t seed,
                                const EpochCallback& on_epoch) {
  config.Validate();
  EpisodeBuffer buffer(config.buffer_capacity, config.k_relabel, env.task.success_radius);
  Rng sample_rng(MixSeed(seed, 0x5a3b));
  Rng random_rng(MixSeed(seed, kRandomStream));
  const int n = env.robot.n_joints();
  int64_t episode_index = 0;
  int64_t env_steps = 0;

  const envs::BatchPolicy explore = [&agent](const Eigen::MatrixXd& t,
                                             const Eigen::MatrixXd& r) {
    return agent.SampleActions(t, r);
  };
  const envs::BatchPolicy random_policy = [&](const Eigen::MatrixXd& t,
                                              const Eigen::MatrixXd&) {
    Eigen::MatrixXd a(n, t.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (int i = 0; i < n; ++i) a(i, j) = random_rng.Uniform(-1.0, 1.0);
    }
    return a;
  };
  auto rollout = [&](const envs::BatchPolicy& policy) {
    envs::EpisodeSummary summary;
    Episode ep = CollectEpisode(
        env, policy, MixSeed(seed, kTrainStream + 0x10000 * (episode_index++)), &summary);
    env_steps += ep.length();
    buffer.Add(std::move(ep));
    return summary.success;
  };

  for (int i = 0; i < config.random_episodes; ++i) rollout(random_policy);
  for (int e = 0; e < config.warmfill_epochs; ++e) {
    for (int c = 0; c < config.cycles_per_epoch * config.episodes_per_cycle; ++c) {
      rollout(explore);
    }
  }

  std::vector<EpochMetrics> log;
  const envs::BatchPolicy greedy = [&agent](const Eigen::MatrixXd& t,
                                            const Eigen::MatrixXd& r) {
    return agent.DeterministicActions(t, r);
  };
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochMetrics m;
    int successes = 0;
    int updates = 0;
    for (int c = 0; c < config.cycles_per_epoch; ++c) {
      for (int k = 0; k < config.episodes_per_cycle; ++k) successes += rollout(explore);
      for (int u = 0; u < config.updates_per_cycle; ++u) {
        Accumulate(m.losses, agent.Update(buffer.Sample(agent.config().batch_size, sample_rng)));
        ++updates;
      }
    }
    if (updates > 0) {
      m.losses.q1 /= updates;
      m.losses.q2 /= updates;
      m.losses.actor /= updates;
      m.losses.alpha_loss /= updates;
      m.losses.entropy /= updates;
    }
    m.losses.alpha = agent.alpha();
    m.epoch = epoch;
    m.env_steps = env_steps;
    m.updates = agent.updates();
    m.train_success_rate =
        static_cast<double>(successes) / (config.cycles_per_epoch * config.episodes_per_cycle);
    const EvalResult eval = Evaluate(greedy, env, config.eval_episodes,
                                     MixSeed(seed, kEvalStream + epoch), config.eval_threads);
    m.success_rate = eval.success_rate;
    m.touching_rate = eval.touching_rate;
    log.push_back(m);
    if (on_epoch) on_epoch(m, agent);
  }
  return log;
}

}  // namespace stitchkit::rl
