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

#include "stitchkit/anchors/corpus.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "stitchkit/errors.h"
#include "stitchkit/nn/random.h"

namespace stitchkit::anchors {

int StateCorpus::CountSource(int source) const {
  return static_cast<int>(std::count(sources.begin(), sources.end(), source));
}

StateCorpus CollectStates(const envs::BatchPolicy& policy, const envs::EnvSpec& env,
                          int n_episodes, uint64_t seed, const std::string& source,
                          bool include_reset) {
  if (n_episodes <= 0) throw ConfigError("collect_states needs n_episodes > 0");
  std::vector<uint64_t> seeds(n_episodes);
  for (int i = 0; i < n_episodes; ++i) seeds[i] = envs::EpisodeSeed(seed, i);
  std::vector<Eigen::VectorXd> states;
  envs::RunEpisodes(env, policy, seeds, [&](const envs::StepRecord& r) {
    if (include_reset && r.t == 0) states.push_back(r.state->task_state);
    states.push_back(r.outcome->next_state.task_state);
  });
  StateCorpus corpus;
  corpus.source_names = {source};
  corpus.states.resize(states.front().size(), static_cast<Eigen::Index>(states.size()));
  for (size_t i = 0; i < states.size(); ++i) corpus.states.col(i) = states[i];
  corpus.sources.assign(states.size(), 0);
  return corpus;
}

StateCorpus Merge(const std::vector<StateCorpus>& parts) {
  if (parts.empty()) throw ConfigError("cannot merge an empty list of corpora");
  StateCorpus out;
  Eigen::Index total = 0;
  for (const StateCorpus& p : parts) {
    if (p.dim() != parts.front().dim()) {
      throw ShapeError("corpora have different state dimensions");
    }
    total += p.size();
  }
  out.states.resize(parts.front().dim(), total);
  Eigen::Index col = 0;
  for (const StateCorpus& p : parts) {
    out.states.middleCols(col, p.size()) = p.states;
    col += p.size();
    for (int s : p.sources) {
      const std::string& name = p.source_names.at(s);
      auto it = std::find(out.source_names.begin(), out.source_names.end(), name);
      if (it == out.source_names.end()) {
        out.source_names.push_back(name);
        it = out.source_names.end() - 1;
      }
      out.sources.push_back(static_cast<int>(it - out.source_names.begin()));
    }
  }
  return out;
}

StateCorpus Balance(const StateCorpus& corpus, uint64_t seed) {
  const int n_sources = static_cast<int>(corpus.source_names.size());
  std::vector<std::vector<int>> members(n_sources);
  for (int i = 0; i < corpus.size(); ++i) members[corpus.sources[i]].push_back(i);
  size_t target = SIZE_MAX;
  for (const auto& m : members) {
    if (!m.empty()) target = std::min(target, m.size());
  }
  Rng rng(MixSeed(seed, 0xba1));
  std::vector<int> keep;
  for (auto& m : members) {
    // Partial Fisher-Yates picks `target` members uniformly.
    for (size_t i = 0; i < target && i < m.size(); ++i) {
      const size_t j = i + rng.UniformInt(m.size() - i);
      std::swap(m[i], m[j]);
    }
    if (m.size() > target) m.resize(target);
    keep.insert(keep.end(), m.begin(), m.end());
  }
  std::sort(keep.begin(), keep.end());
  StateCorpus out;
  out.source_names = corpus.source_names;
  out.states.resize(corpus.dim(), static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    out.states.col(i) = corpus.states.col(keep[i]);
    out.sources.push_back(corpus.sources[keep[i]]);
  }
  return out;
}

}  // namespace stitchkit::anchors
