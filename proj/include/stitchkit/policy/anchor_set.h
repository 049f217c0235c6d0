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

#ifndef STITCHKIT_POLICY_ANCHOR_SET_H_
#define STITCHKIT_POLICY_ANCHOR_SET_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stitchkit::policy {

// k raw task states shared by every policy of an experiment. Stored as a
// d x k matrix (one anchor per column). The hash is the SHA-256 of
// Serialize(), so it identifies the anchor contents exactly.
class AnchorSet {
 public:
  // Throws ConfigError if k == 0 or two anchors are identical.
  explicit AnchorSet(Eigen::MatrixXd states);

  int k() const { return static_cast<int>(states_.cols()); }
  int dim() const { return static_cast<int>(states_.rows()); }
  const Eigen::MatrixXd& states() const { return states_; }
  const std::string& hash() const { return hash_; }

  // k (u64), d (u64), then the anchors row-major (anchor after anchor) as
  // 64-bit little-endian doubles.
  std::vector<uint8_t> Serialize() const;

 private:
  Eigen::MatrixXd states_;
  std::string hash_;
};

}  // namespace stitchkit::policy

#endif  // STITCHKIT_POLICY_ANCHOR_SET_H_
