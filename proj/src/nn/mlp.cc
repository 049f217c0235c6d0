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

#include "stitchkit/nn/mlp.h"

#include <atomic>
#include <cmath>
#include <utility>

#include "stitchkit/errors.h"

namespace stitchkit::nn {
namespace {

std::atomic<uint64_t> next_network_id{1};

void ApplyActivation(Activation activation, Eigen::MatrixXd& z) {
  switch (activation) {
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::kIdentity:
      break;
  }
}

// grad <- grad * activation'(pre), expressed through the post-activation
// output.
void ApplyActivationGrad(Activation activation, const Eigen::MatrixXd& out,
                         Eigen::MatrixXd& grad) {
  switch (activation) {
    case Activation::kRelu:
      grad = (out.array() > 0.0).select(grad, 0.0);
      break;
    case Activation::kTanh:
      grad.array() *= 1.0 - out.array().square();
      break;
    case Activation::kIdentity:
      break;
  }
}

}  // namespace

std::string ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kIdentity:
      return "identity";
  }
  return "identity";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer& layer = layers_[i];
    if (layer.weight.rows() != layer.bias.size()) {
      throw ShapeError("layer " + std::to_string(i) +
                       ": bias length does not match weight rows");
    }
    if (i > 0 && layers_[i - 1].weight.rows() != layer.weight.cols()) {
      throw ShapeError("layer " + std::to_string(i) +
                       ": input width does not match previous output");
    }
  }
  Touch();
}

Mlp Mlp::Create(std::span<const int> widths, Activation hidden,
                Activation output, Rng& rng) {
  if (widths.size() < 2) throw ShapeError("an MLP needs at least two widths");
  std::vector<DenseLayer> layers;
  for (size_t i = 0; i + 1 < widths.size(); ++i) {
    const int in = widths[i];
    const int out = widths[i + 1];
    if (in <= 0 || out <= 0) throw ShapeError("layer widths must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer;
    layer.weight.resize(out, in);
    layer.bias.resize(out);
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) layer.weight(r, c) = rng.Uniform(-bound, bound);
    }
    for (int r = 0; r < out; ++r) layer.bias(r) = rng.Uniform(-bound, bound);
    layer.activation = (i + 2 == widths.size()) ? output : hidden;
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

int Mlp::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int Mlp::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

int Mlp::num_params() const {
  int n = 0;
  for (const DenseLayer& layer : layers_) {
    n += static_cast<int>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

void Mlp::Touch() { id_ = next_network_id.fetch_add(1); }

void Mlp::CheckInput(const Eigen::MatrixXd& x) const {
  if (layers_.empty()) throw UsageError("forward on an empty network");
  if (x.rows() != input_dim()) {
    throw ShapeError("network expects input of width " +
                     std::to_string(input_dim()) + ", got " +
                     std::to_string(x.rows()));
  }
}

Eigen::MatrixXd Mlp::Forward(const Eigen::MatrixXd& x) const {
  CheckInput(x);
  Eigen::MatrixXd h = x;
  for (const DenseLayer& layer : layers_) {
    Eigen::MatrixXd z(layer.weight.rows(), h.cols());
    z.noalias() = layer.weight * h;
    z.colwise() += layer.bias;
    ApplyActivation(layer.activation, z);
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd Mlp::Forward(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd batch = x;
  return Forward(batch).col(0);
}

Eigen::MatrixXd Mlp::Forward(const Eigen::MatrixXd& x,
                             GradientTape& tape) const {
  CheckInput(x);
  tape = GradientTape();
  tape.network_id_ = id_;
  tape.inputs_.reserve(layers_.size());
  tape.outputs_.reserve(layers_.size());
  tape.inputs_.push_back(x);
  for (size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer& layer = layers_[i];
    Eigen::MatrixXd z(layer.weight.rows(), x.cols());
    z.noalias() = layer.weight * tape.inputs_.back();
    z.colwise() += layer.bias;
    ApplyActivation(layer.activation, z);
    if (i + 1 < layers_.size()) tape.inputs_.push_back(z);
    tape.outputs_.push_back(std::move(z));
  }
  tape.recorded_ = true;
  return tape.outputs_.back();
}

Eigen::MatrixXd Mlp::Activations(const Eigen::MatrixXd& x, int layer) const {
  CheckInput(x);
  if (layer < 0 || layer >= num_layers()) {
    throw ShapeError("layer index out of range");
  }
  Eigen::MatrixXd h = x;
  for (int i = 0; i <= layer; ++i) {
    Eigen::MatrixXd z(layers_[i].weight.rows(), h.cols());
    z.noalias() = layers_[i].weight * h;
    z.colwise() += layers_[i].bias;
    ApplyActivation(layers_[i].activation, z);
    h = std::move(z);
  }
  return h;
}

MlpGradient Mlp::Backward(GradientTape& tape,
                          const Eigen::MatrixXd& output_grad) const {
  if (!tape.recorded_) throw UsageError("backward on an unrecorded tape");
  if (tape.consumed_) throw UsageError("gradient tape already consumed");
  if (tape.network_id_ != id_) {
    throw UsageError("gradient tape belongs to a different or modified network");
  }
  const Eigen::Index batch = tape.inputs_.front().cols();
  if (output_grad.rows() != output_dim() || output_grad.cols() != batch) {
    throw ShapeError("output gradient shape does not match forward output");
  }
  tape.consumed_ = true;

  MlpGradient grad;
  grad.params.resize(num_params());
  Eigen::Index offset = grad.params.size();
  Eigen::MatrixXd g = output_grad;
  for (int i = num_layers() - 1; i >= 0; --i) {
    const DenseLayer& layer = layers_[i];
    ApplyActivationGrad(layer.activation, tape.outputs_[i], g);
    const Eigen::Index nb = layer.bias.size();
    const Eigen::Index nw = layer.weight.size();
    offset -= nb;
    grad.params.segment(offset, nb) = g.rowwise().sum();
    offset -= nw;
    Eigen::Map<Eigen::MatrixXd> dw(grad.params.data() + offset,
                                   layer.weight.rows(), layer.weight.cols());
    dw.noalias() = g * tape.inputs_[i].transpose();
    Eigen::MatrixXd next(layer.weight.cols(), batch);
    next.noalias() = layer.weight.transpose() * g;
    g = std::move(next);
  }
  grad.input = std::move(g);
  // Tape buffers are no longer needed.
  tape.inputs_.clear();
  tape.outputs_.clear();
  return grad;
}

Eigen::VectorXd Mlp::Flatten() const {
  Eigen::VectorXd flat(num_params());
  Eigen::Index offset = 0;
  for (const DenseLayer& layer : layers_) {
    flat.segment(offset, layer.weight.size()) =
        Eigen::Map<const Eigen::VectorXd>(layer.weight.data(),
                                          layer.weight.size());
    offset += layer.weight.size();
    flat.segment(offset, layer.bias.size()) = layer.bias;
    offset += layer.bias.size();
  }
  return flat;
}

void Mlp::Assign(const Eigen::VectorXd& flat) {
  if (flat.size() != num_params()) {
    throw ShapeError("flat parameter vector has " + std::to_string(flat.size()) +
                     " entries, network has " + std::to_string(num_params()));
  }
  Eigen::Index offset = 0;
  for (DenseLayer& layer : layers_) {
    Eigen::Map<Eigen::VectorXd>(layer.weight.data(), layer.weight.size()) =
        flat.segment(offset, layer.weight.size());
    offset += layer.weight.size();
    layer.bias = flat.segment(offset, layer.bias.size());
    offset += layer.bias.size();
  }
  Touch();
}

Mlp Mlp::Slice(int begin, int end) const {
  if (begin < 0 || end > num_layers() || begin >= end) {
    throw ShapeError("invalid layer slice");
  }
  return Mlp(std::vector<DenseLayer>(layers_.begin() + begin,
                                     layers_.begin() + end));
}

Mlp Mlp::Concat(const Mlp& top, const Mlp& bottom) {
  std::vector<DenseLayer> layers = top.layers_;
  layers.insert(layers.end(), bottom.layers_.begin(), bottom.layers_.end());
  return Mlp(std::move(layers));
}

std::vector<int> Mlp::Widths() const {
  std::vector<int> widths;
  if (layers_.empty()) return widths;
  widths.push_back(input_dim());
  for (const DenseLayer& layer : layers_) {
    widths.push_back(static_cast<int>(layer.weight.rows()));
  }
  return widths;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.num_layers() != b.num_layers()) return false;
  for (int i = 0; i < a.num_layers(); ++i) {
    const DenseLayer& x = a.layers()[i];
    const DenseLayer& y = b.layers()[i];
    if (x.activation != y.activation || x.weight.rows() != y.weight.rows() ||
        x.weight.cols() != y.weight.cols() || x.weight != y.weight ||
        x.bias != y.bias) {
      return false;
    }
  }
  return true;
}

}  // namespace stitchkit::nn
