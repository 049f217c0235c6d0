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

#include "stitchkit/policy/anchor_set.h"

#include <utility>

#include "stitchkit/errors.h"
#include "stitchkit/util/sha256.h"

namespace stitchkit::policy {

AnchorSet::AnchorSet(Eigen::MatrixXd states) : states_(std::move(states)) {
  if (states_.cols() == 0 || states_.rows() == 0) {
    throw ConfigError("anchor set must contain at least one state");
  }
  if (!states_.allFinite()) throw ConfigError("anchor states must be finite");
  for (Eigen::Index i = 0; i < states_.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < states_.cols(); ++j) {
      if (states_.col(i) == states_.col(j)) {
        throw ConfigError("anchor set contains duplicate states " +
                          std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
  hash_ = Sha256Hex(Serialize());
}

std::vector<uint8_t> AnchorSet::Serialize() const {
  std::vector<uint8_t> out;
  out.reserve(16 + 8 * states_.size());
  AppendU64(out, static_cast<uint64_t>(states_.cols()));
  AppendU64(out, static_cast<uint64_t>(states_.rows()));
  for (Eigen::Index a = 0; a < states_.cols(); ++a) {
    for (Eigen::Index d = 0; d < states_.rows(); ++d) AppendF64(out, states_(d, a));
  }
  return out;
}

}  // namespace stitchkit::policy
