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

#ifndef STITCHKIT_POLICY_RELATIVE_REPRESENTATION_H_
#define STITCHKIT_POLICY_RELATIVE_REPRESENTATION_H_

#include <Eigen/Dense>

namespace stitchkit::policy {

// Intermediates needed by RelativeRepresentationBackward.
struct RelRepCache {
  bool normalize = true;
  Eigen::MatrixXd states;        // L x B, as given
  Eigen::MatrixXd anchors;       // L x k, as given
  Eigen::VectorXd states_std;
  Eigen::VectorXd anchors_std;
  Eigen::MatrixXd unit_states;   // L x B, zero column where the norm vanished
  Eigen::MatrixXd unit_anchors;  // L x k
  Eigen::VectorXd states_norm;
  Eigen::VectorXd anchors_norm;
  Eigen::MatrixXd similarity;    // k x B
};

// Cosine similarity of every embedded state (column of `embedded_states`,
// L x B) to every embedded anchor (column of `embedded_anchors`, L x k),
// optionally after per-vector standardization. Returns k x B. A vector that
// normalizes to zero contributes similarity 0.
Eigen::MatrixXd RelativeRepresentation(const Eigen::MatrixXd& embedded_states,
                                       const Eigen::MatrixXd& embedded_anchors,
                                       bool normalize = true,
                                       RelRepCache* cache = nullptr);

// Vector-Jacobian product. Either output pointer may be null.
void RelativeRepresentationBackward(const RelRepCache& cache,
                                    const Eigen::MatrixXd& grad,
                                    Eigen::MatrixXd* grad_states,
                                    Eigen::MatrixXd* grad_anchors);

}  // namespace stitchkit::policy

#endif  // STITCHKIT_POLICY_RELATIVE_REPRESENTATION_H_
