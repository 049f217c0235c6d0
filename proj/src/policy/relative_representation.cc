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

#include "stitchkit/policy/relative_representation.h"

#include "stitchkit/errors.h"
#include "stitchkit/nn/normalize.h"

namespace stitchkit::policy {
namespace {

constexpr double kZeroNorm = 1e-12;

void ToUnit(const Eigen::MatrixXd& x, Eigen::MatrixXd& unit,
            Eigen::VectorXd& norms) {
  norms = x.colwise().norm().transpose();
  unit = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (norms(j) > kZeroNorm) {
      unit.col(j) /= norms(j);
    } else {
      unit.col(j).setZero();
    }
  }
}

// d/dx of x/|x| applied to `grad_unit`, column-wise.
Eigen::MatrixXd UnitBackward(const Eigen::MatrixXd& unit,
                             const Eigen::VectorXd& norms,
                             const Eigen::MatrixXd& grad_unit) {
  Eigen::MatrixXd out(unit.rows(), unit.cols());
  for (Eigen::Index j = 0; j < unit.cols(); ++j) {
    if (norms(j) > kZeroNorm) {
      const double along = unit.col(j).dot(grad_unit.col(j));
      out.col(j) = (grad_unit.col(j) - along * unit.col(j)) / norms(j);
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd RelativeRepresentation(const Eigen::MatrixXd& embedded_states,
                                       const Eigen::MatrixXd& embedded_anchors,
                                       bool normalize, RelRepCache* cache) {
  if (embedded_anchors.cols() == 0) {
    throw ConfigError("relative representation needs at least one anchor");
  }
  if (embedded_states.rows() != embedded_anchors.rows()) {
    throw ShapeError("state and anchor embeddings differ in width");
  }
  RelRepCache local;
  RelRepCache& c = cache != nullptr ? *cache : local;
  c.normalize = normalize;
  c.states = embedded_states;
  c.anchors = embedded_anchors;
  if (normalize) {
    if (embedded_states.rows() < 2) {
      throw ShapeError("normalization needs latent width >= 2");
    }
    ToUnit(nn::NormalizeColumns(embedded_states, &c.states_std), c.unit_states,
           c.states_norm);
    ToUnit(nn::NormalizeColumns(embedded_anchors, &c.anchors_std),
           c.unit_anchors, c.anchors_norm);
  } else {
    ToUnit(embedded_states, c.unit_states, c.states_norm);
    ToUnit(embedded_anchors, c.unit_anchors, c.anchors_norm);
  }
  c.similarity.noalias() = c.unit_anchors.transpose() * c.unit_states;
  return c.similarity;
}

void RelativeRepresentationBackward(const RelRepCache& cache,
                                    const Eigen::MatrixXd& grad,
                                    Eigen::MatrixXd* grad_states,
                                    Eigen::MatrixXd* grad_anchors) {
  if (grad.rows() != cache.similarity.rows() ||
      grad.cols() != cache.similarity.cols()) {
    throw ShapeError("relative representation gradient has the wrong shape");
  }
  if (grad_states != nullptr) {
    Eigen::MatrixXd d_unit = cache.unit_anchors * grad;  // L x B
    Eigen::MatrixXd d = UnitBackward(cache.unit_states, cache.states_norm, d_unit);
    *grad_states = cache.normalize
                       ? nn::NormalizeColumnsBackward(cache.states,
                                                      cache.states_std, d)
                       : d;
  }
  if (grad_anchors != nullptr) {
    Eigen::MatrixXd d_unit = cache.unit_states * grad.transpose();  // L x k
    Eigen::MatrixXd d =
        UnitBackward(cache.unit_anchors, cache.anchors_norm, d_unit);
    *grad_anchors = cache.normalize
                        ? nn::NormalizeColumnsBackward(cache.anchors,
                                                       cache.anchors_std, d)
                        : d;
  }
}

}  // namespace stitchkit::policy
