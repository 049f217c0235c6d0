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

#ifndef STITCHKIT_ANCHORS_SELECT_H_
#define STITCHKIT_ANCHORS_SELECT_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "stitchkit/anchors/corpus.h"
#include "stitchkit/policy/anchor_set.h"

namespace stitchkit::anchors {

// For each centroid in order, the corpus state nearest to it (lowest corpus
// index on ties). A state whose value was already chosen is skipped in
// favour of the next-nearest one. Throws ConfigError if the corpus has fewer
// distinct states than there are centroids.
policy::AnchorSet SelectAnchors(const Eigen::MatrixXd& corpus,
                                const Eigen::MatrixXd& centroids,
                                std::vector<int>* chosen = nullptr);

// Balance, cluster and select: the full anchor pipeline over a corpus.
policy::AnchorSet BuildAnchorSet(const StateCorpus& corpus, int k, uint64_t seed,
                                 bool balance = true);

// Anchor file: magic "SKANCHOR", u32 version, the AnchorSet serialization,
// then the 64-character hex hash of that serialization.
void SaveAnchorSet(const std::filesystem::path& path, const policy::AnchorSet& anchors);
policy::AnchorSet LoadAnchorSet(const std::filesystem::path& path);

}  // namespace stitchkit::anchors

#endif  // STITCHKIT_ANCHORS_SELECT_H_
