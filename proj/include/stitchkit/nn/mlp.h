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

#ifndef STITCHKIT_NN_MLP_H_
#define STITCHKIT_NN_MLP_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stitchkit/nn/random.h"

namespace stitchkit::nn {

enum class Activation { kRelu, kTanh, kIdentity };

std::string ActivationName(Activation activation);
Activation ParseActivation(const std::string& name);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::kIdentity;
};

// Forward intermediates for one batched forward pass. A tape is filled by
// Mlp::Forward and consumed by exactly one Mlp::Backward.
class GradientTape {
 public:
  bool recorded() const { return recorded_; }
  bool consumed() const { return consumed_; }

 private:
  friend class Mlp;
  uint64_t network_id_ = 0;
  std::vector<Eigen::MatrixXd> inputs_;
  std::vector<Eigen::MatrixXd> outputs_;
  bool recorded_ = false;
  bool consumed_ = false;
};

struct MlpGradient {
  // Same layout as Mlp::Flatten().
  Eigen::VectorXd params;
  // d loss / d input, input_dim x batch.
  Eigen::MatrixXd input;
};

// Dense feed-forward network. Batched inputs are column-major: one sample per
// column.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  // widths = {input, hidden..., output}. Hidden layers use `hidden`, the last
  // layer uses `output`. Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static Mlp Create(std::span<const int> widths, Activation hidden,
                    Activation output, Rng& rng);

  int input_dim() const;
  int output_dim() const;
  int num_layers() const { return static_cast<int>(layers_.size()); }
  int num_params() const;
  bool empty() const { return layers_.empty(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  uint64_t id() const { return id_; }

  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, GradientTape& tape) const;
  Eigen::VectorXd Forward(const Eigen::VectorXd& x) const;

  // Activations after layer `layer` (0-based), i.e. the input of the next one.
  Eigen::MatrixXd Activations(const Eigen::MatrixXd& x, int layer) const;

  MlpGradient Backward(GradientTape& tape,
                       const Eigen::MatrixXd& output_grad) const;

  Eigen::VectorXd Flatten() const;
  void Assign(const Eigen::VectorXd& flat);

  // Layers [begin, end) as a standalone network.
  Mlp Slice(int begin, int end) const;
  // `top` followed by `bottom`; dimensions must chain.
  static Mlp Concat(const Mlp& top, const Mlp& bottom);

  std::vector<int> Widths() const;

 private:
  void CheckInput(const Eigen::MatrixXd& x) const;
  void Touch();

  std::vector<DenseLayer> layers_;
  uint64_t id_ = 0;
};

bool operator==(const Mlp& a, const Mlp& b);

}  // namespace stitchkit::nn

#endif  // STITCHKIT_NN_MLP_H_
