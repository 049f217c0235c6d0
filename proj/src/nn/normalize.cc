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

#include "stitchkit/nn/normalize.h"

#include <cmath>

#include "stitchkit/errors.h"

namespace stitchkit::nn {

Eigen::VectorXd NormalizeVector(const Eigen::VectorXd& v) {
  if (v.size() < 2) throw ShapeError("normalize_vector needs at least 2 entries");
  Eigen::MatrixXd column = v;
  return NormalizeColumns(column).col(0);
}

Eigen::MatrixXd NormalizeColumns(const Eigen::MatrixXd& x,
                                 Eigen::VectorXd* stddev) {
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::VectorXd sigma =
      (centered.colwise().squaredNorm().transpose() / n).cwiseSqrt();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    centered.col(j) /= sigma(j) + kNormalizeEpsilon;
  }
  if (stddev != nullptr) *stddev = std::move(sigma);
  return centered;
}

// y = c / (s + eps), c = x - mean(x), s = sqrt(mean(c^2)).
// dL/dx = (g - mean(g)) / (s + eps) - (g.c) c / ((s + eps)^2 n s).
Eigen::MatrixXd NormalizeColumnsBackward(const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& stddev,
                                         const Eigen::MatrixXd& grad) {
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double s = stddev(j);
    const double denom = s + kNormalizeEpsilon;
    const Eigen::VectorXd c = x.col(j).array() - x.col(j).mean();
    const Eigen::VectorXd g = grad.col(j);
    Eigen::VectorXd dx = (g.array() - g.mean()).matrix() / denom;
    if (s > 0.0) dx -= (g.dot(c) / (denom * denom * n * s)) * c;
    out.col(j) = dx;
  }
  return out;
}

}  // namespace stitchkit::nn
