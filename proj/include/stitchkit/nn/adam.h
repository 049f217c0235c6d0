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

#ifndef STITCHKIT_NN_ADAM_H_
#define STITCHKIT_NN_ADAM_H_

#include <cstdint>

#include <Eigen/Dense>

namespace stitchkit::nn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over one flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index num_params, AdamConfig config);

  void Step(Eigen::VectorXd& params, const Eigen::VectorXd& grads);

  const AdamConfig& config() const { return config_; }
  int64_t step_count() const { return step_count_; }
  const Eigen::VectorXd& first_moment() const { return first_moment_; }
  const Eigen::VectorXd& second_moment() const { return second_moment_; }

 private:
  AdamConfig config_;
  Eigen::VectorXd first_moment_;
  Eigen::VectorXd second_moment_;
  int64_t step_count_ = 0;
};

}  // namespace stitchkit::nn

#endif  // STITCHKIT_NN_ADAM_H_
