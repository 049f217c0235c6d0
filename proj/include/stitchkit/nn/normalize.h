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

#ifndef STITCHKIT_NN_NORMALIZE_H_
#define STITCHKIT_NN_NORMALIZE_H_

#include <Eigen/Dense>

namespace stitchkit::nn {

inline constexpr double kNormalizeEpsilon = 1e-8;

// (v - mean(v)) / (std(v) + eps) with the population standard deviation.
// Constant vectors map to zero.
Eigen::VectorXd NormalizeVector(const Eigen::VectorXd& v);

// Column-wise NormalizeVector. `stddev`, when given, receives the per-column
// population standard deviation for use in the backward pass.
Eigen::MatrixXd NormalizeColumns(const Eigen::MatrixXd& x,
                                 Eigen::VectorXd* stddev = nullptr);

// Vector-Jacobian product of NormalizeColumns at `x`.
Eigen::MatrixXd NormalizeColumnsBackward(const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& stddev,
                                         const Eigen::MatrixXd& grad);

}  // namespace stitchkit::nn

#endif  // STITCHKIT_NN_NORMALIZE_H_
