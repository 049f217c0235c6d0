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

#include "stitchkit/nn/adam.h"

#include <cmath>
#include <string>

#include "stitchkit/errors.h"

namespace stitchkit::nn {

Adam::Adam(Eigen::Index num_params, AdamConfig config)
    : config_(config),
      first_moment_(Eigen::VectorXd::Zero(num_params)),
      second_moment_(Eigen::VectorXd::Zero(num_params)) {}

void Adam::Step(Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
  if (params.size() != first_moment_.size() ||
      grads.size() != first_moment_.size()) {
    throw ShapeError("adam: expected " + std::to_string(first_moment_.size()) +
                     " parameters, got params=" + std::to_string(params.size()) +
                     " grads=" + std::to_string(grads.size()));
  }
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  first_moment_ = config_.beta1 * first_moment_ + (1.0 - config_.beta1) * grads;
  second_moment_ = config_.beta2 * second_moment_ +
                   (1.0 - config_.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  params.array() -= config_.learning_rate * (first_moment_.array() / c1) /
                    ((second_moment_.array() / c2).sqrt() + config_.epsilon);
}

}  // namespace stitchkit::nn
