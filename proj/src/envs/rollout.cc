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

#include "stitchkit/envs/rollout.h"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

#include "stitchkit/errors.h"
#include "stitchkit/nn/random.h"

namespace stitchkit::envs {
namespace {

constexpr int kGroupSize = 64;

struct Trace {
  EnvState state;
  Eigen::VectorXd action;
  StepOutcome outcome;
  PlanarArmEnv env;  // right after the step
};

// Runs seeds[begin, end) in lockstep. Traces are kept per episode when a
// step callback is needed so callbacks can be replayed in order afterwards.
void RunGroup(const EnvSpec& spec, const BatchPolicy& policy,
              std::span<const uint64_t> seeds, int begin, int end,
              std::vector<EpisodeSummary>& summaries,
              std::vector<std::vector<Trace>>* traces) {
  const int n = end - begin;
  std::vector<PlanarArmEnv> envs;
  envs.reserve(n);
  std::vector<EnvState> states;
  for (int i = 0; i < n; ++i) {
    envs.push_back(spec.Make());
    states.push_back(envs.back().Reset(seeds[begin + i]));
  }
  const int dt = envs.front().task_dim();
  const int dr = envs.front().robot_dim();
  const int na = envs.front().action_dim();
  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;
  while (!active.empty()) {
    const int b = static_cast<int>(active.size());
    Eigen::MatrixXd task(dt, b), robot(dr, b);
    for (int j = 0; j < b; ++j) {
      task.col(j) = states[active[j]].task_state;
      robot.col(j) = states[active[j]].robot_state;
    }
    const Eigen::MatrixXd actions = policy(task, robot);
    if (actions.rows() != na || actions.cols() != b) {
      throw ShapeError("policy returned " + std::to_string(actions.rows()) +
                       " action rows for an environment with " +
                       std::to_string(na) + " joints");
    }
    std::vector<int> still;
    for (int j = 0; j < b; ++j) {
      const int i = active[j];
      Eigen::VectorXd a = actions.col(j);
      StepOutcome out = envs[i].Step(a);
      EpisodeSummary& s = summaries[begin + i];
      s.steps += 1;
      s.touched = s.touched || out.touched;
      s.success = out.success;
      if (traces != nullptr) {
        (*traces)[i].push_back(Trace{states[i], a, out, envs[i]});
      }
      states[i] = out.next_state;
      if (!out.done) still.push_back(i);
    }
    active.swap(still);
  }
}

}  // namespace

uint64_t EpisodeSeed(uint64_t seed, int index) {
  return MixSeed(seed, 0x1000 + static_cast<uint64_t>(index));
}

std::vector<EpisodeSummary> RunEpisodes(
    const EnvSpec& spec, const BatchPolicy& policy, std::span<const uint64_t> seeds,
    const std::function<void(const StepRecord&)>& on_step, int threads) {
  const int total = static_cast<int>(seeds.size());
  std::vector<EpisodeSummary> summaries(total);
  if (total == 0) return summaries;
  const int groups = (total + kGroupSize - 1) / kGroupSize;

  if (on_step) {
    // Sequential so that callbacks see episodes in order.
    for (int g = 0; g < groups; ++g) {
      const int begin = g * kGroupSize;
      const int end = std::min(total, begin + kGroupSize);
      std::vector<std::vector<Trace>> traces(end - begin);
      RunGroup(spec, policy, seeds, begin, end, summaries, &traces);
      for (int i = 0; i < end - begin; ++i) {
        for (size_t t = 0; t < traces[i].size(); ++t) {
          const Trace& tr = traces[i][t];
          on_step(StepRecord{begin + i, static_cast<int>(t), &tr.state, &tr.action,
                             &tr.outcome, &tr.env});
        }
      }
    }
    return summaries;
  }

  threads = std::max(1, std::min(threads, groups));
  if (threads == 1) {
    for (int g = 0; g < groups; ++g) {
      RunGroup(spec, policy, seeds, g * kGroupSize,
               std::min(total, (g + 1) * kGroupSize), summaries, nullptr);
    }
    return summaries;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int g = w; g < groups; g += threads) {
          RunGroup(spec, policy, seeds, g * kGroupSize,
                   std::min(total, (g + 1) * kGroupSize), summaries, nullptr);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return summaries;
}

int EvalThreads() {
  const char* value = std::getenv("STITCHKIT_THREADS");
  if (value == nullptr) return 1;
  try {
    const int n = std::stoi(value);
    return n > 0 ? n : 1;
  } catch (const std::exception&) {
    throw ConfigError(std::string("STITCHKIT_THREADS must be a positive integer, got '") +
                      value + "'");
  }
}

}  // namespace stitchkit::envs
