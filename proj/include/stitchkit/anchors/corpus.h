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

#ifndef STITCHKIT_ANCHORS_CORPUS_H_
#define STITCHKIT_ANCHORS_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stitchkit/envs/presets.h"
#include "stitchkit/envs/rollout.h"

namespace stitchkit::anchors {

// Raw task states (one per column) with the source each came from.
struct StateCorpus {
  Eigen::MatrixXd states;            // d x n
  std::vector<int> sources;          // index into source_names, per column
  std::vector<std::string> source_names;

  int size() const { return static_cast<int>(states.cols()); }
  int dim() const { return static_cast<int>(states.rows()); }
  int CountSource(int source) const;
};

// Records the task state reached by every step of every episode, so an
// episode of T steps gives T states. `include_reset` also records each
// episode's initial state.
StateCorpus CollectStates(const envs::BatchPolicy& policy, const envs::EnvSpec& env,
                          int n_episodes, uint64_t seed, const std::string& source,
                          bool include_reset = false);

// Concatenates corpora in order; sources with equal names are merged.
StateCorpus Merge(const std::vector<StateCorpus>& parts);

// Subsamples every source down to the size of the smallest one (uniformly
// without replacement, original order kept).
StateCorpus Balance(const StateCorpus& corpus, uint64_t seed);

}  // namespace stitchkit::anchors

#endif  // STITCHKIT_ANCHORS_CORPUS_H_
