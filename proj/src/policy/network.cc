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

#include "stitchkit/policy/network.h"

#include <utility>

#include "stitchkit/errors.h"

namespace stitchkit::policy {
namespace {

std::vector<int> Chain(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> widths = {in};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(out);
  return widths;
}

Eigen::MatrixXd StackRows(const Eigen::MatrixXd& top,
                          const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace

std::string AlignmentName(Alignment alignment) {
  return alignment == Alignment::kRelative ? "relative" : "none";
}

Alignment ParseAlignment(const std::string& name) {
  if (name == "relative") return Alignment::kRelative;
  if (name == "none") return Alignment::kNone;
  throw ConfigError("unknown alignment '" + name + "'");
}

int NetworkSpec::interface_dim() const {
  if (kind == NetworkKind::kPlain) {
    return plain_hidden.empty() ? 0 : plain_hidden[split_layer - 1];
  }
  return latent_dim;
}

void NetworkSpec::Validate() const {
  if (task_dim <= 0 || extra_dim <= 0 || output_dim <= 0) {
    throw ShapeError("network dimensions must be positive");
  }
  if (kind == NetworkKind::kPlain) {
    if (plain_hidden.empty()) throw ConfigError("plain network needs hidden layers");
    // Layers are numbered 1..depth+1; the split must leave both halves nonempty.
    if (split_layer < 1 || split_layer > static_cast<int>(plain_hidden.size())) {
      throw ConfigError("plain split layer " + std::to_string(split_layer) +
                        " is not strictly interior");
    }
    return;
  }
  if (latent_dim <= 0) throw ConfigError("latent_dim must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
  if (alignment == Alignment::kRelative) {
    if (normalize && latent_dim < 2) {
      throw ConfigError("normalized relative representation needs latent_dim >= 2");
    }
    if (anchor_hash.empty()) {
      throw ConfigError("relative alignment requires an anchor set hash");
    }
  }
}

nlohmann::json NetworkSpec::ToJson() const {
  nlohmann::json j;
  j["kind"] = kind == NetworkKind::kPlain ? "plain" : "modular";
  j["task_dim"] = task_dim;
  j["extra_dim"] = extra_dim;
  j["output_dim"] = output_dim;
  j["hidden_activation"] = nn::ActivationName(hidden_activation);
  if (kind == NetworkKind::kPlain) {
    j["plain_hidden"] = plain_hidden;
    j["split_layer"] = split_layer;
  } else {
    j["task_hidden"] = task_hidden;
    j["latent_dim"] = latent_dim;
    j["robot_hidden"] = robot_hidden;
    j["alignment"] = AlignmentName(alignment);
    j["normalize"] = normalize;
    j["dropout"] = dropout;
    j["anchor_stop_gradient"] = anchor_stop_gradient;
    j["anchor_hash"] = anchor_hash;
  }
  return j;
}

NetworkSpec NetworkSpec::FromJson(const nlohmann::json& j) {
  NetworkSpec s;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "plain" && kind != "modular") {
      throw ConfigError("unknown network kind '" + kind + "'");
    }
    s.kind = kind == "plain" ? NetworkKind::kPlain : NetworkKind::kModular;
    s.task_dim = j.at("task_dim").get<int>();
    s.extra_dim = j.at("extra_dim").get<int>();
    s.output_dim = j.at("output_dim").get<int>();
    s.hidden_activation =
        nn::ParseActivation(j.at("hidden_activation").get<std::string>());
    if (s.kind == NetworkKind::kPlain) {
      s.plain_hidden = j.at("plain_hidden").get<std::vector<int>>();
      s.split_layer = j.at("split_layer").get<int>();
    } else {
      s.task_hidden = j.at("task_hidden").get<std::vector<int>>();
      s.latent_dim = j.at("latent_dim").get<int>();
      s.robot_hidden = j.at("robot_hidden").get<std::vector<int>>();
      s.alignment = ParseAlignment(j.at("alignment").get<std::string>());
      s.normalize = j.at("normalize").get<bool>();
      s.dropout = j.at("dropout").get<double>();
      s.anchor_stop_gradient = j.at("anchor_stop_gradient").get<bool>();
      s.anchor_hash = j.at("anchor_hash").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed network descriptor: ") + e.what());
  }
  s.Validate();
  return s;
}

SplitNetwork::SplitNetwork(NetworkSpec spec, Rng& rng) : spec_(std::move(spec)) {
  spec_.Validate();
  const nn::Activation act = spec_.hidden_activation;
  if (spec_.kind == NetworkKind::kPlain) {
    const std::vector<int> widths =
        Chain(spec_.task_dim + spec_.extra_dim, spec_.plain_hidden, spec_.output_dim);
    nn::Mlp full = nn::Mlp::Create(widths, act, nn::Activation::kIdentity, rng);
    task_module_ = full.Slice(0, spec_.split_layer);
    robot_module_ = full.Slice(spec_.split_layer, full.num_layers());
    return;
  }
  task_module_ = nn::Mlp::Create(
      Chain(spec_.task_dim, spec_.task_hidden, spec_.latent_dim), act,
      nn::Activation::kIdentity, rng);
  robot_module_ = nn::Mlp::Create(
      Chain(spec_.interface_dim() + spec_.extra_dim, spec_.robot_hidden,
            spec_.output_dim),
      act, nn::Activation::kIdentity, rng);
}

SplitNetwork::SplitNetwork(NetworkSpec spec, nn::Mlp task_module,
                           nn::Mlp robot_module)
    : spec_(std::move(spec)),
      task_module_(std::move(task_module)),
      robot_module_(std::move(robot_module)) {
  spec_.Validate();
  const bool plain = spec_.kind == NetworkKind::kPlain;
  const int task_in = plain ? spec_.task_dim + spec_.extra_dim : spec_.task_dim;
  if (task_module_.input_dim() != task_in ||
      task_module_.output_dim() != spec_.interface_dim() ||
      robot_module_.input_dim() !=
          spec_.interface_dim() + (plain ? 0 : spec_.extra_dim) ||
      robot_module_.output_dim() != spec_.output_dim) {
    throw ShapeError("module shapes do not match the network descriptor");
  }
  if (plain && task_module_.num_layers() != spec_.split_layer) {
    throw ShapeError("plain top half does not end at the declared split layer");
  }
}

void SplitNetwork::AttachAnchors(std::shared_ptr<const AnchorSet> anchors) {
  if (spec_.kind != NetworkKind::kModular ||
      spec_.alignment != Alignment::kRelative) {
    anchors_ = std::move(anchors);
    return;
  }
  if (!anchors) throw ConfigError("relative alignment needs an anchor set");
  if (anchors->hash() != spec_.anchor_hash) {
    throw IncompatibleError("anchor set hash " + anchors->hash().substr(0, 12) +
                            " does not match network anchor hash " +
                            spec_.anchor_hash.substr(0, 12));
  }
  if (anchors->dim() != spec_.task_dim) {
    throw ShapeError("anchor states do not match the task state width");
  }
  if (anchors->k() != spec_.latent_dim) {
    throw ShapeError("anchor count k must equal the latent width");
  }
  anchors_ = std::move(anchors);
}

void SplitNetwork::CheckInputs(const Eigen::MatrixXd& task_state,
                               const Eigen::MatrixXd& extra) const {
  if (task_state.rows() != spec_.task_dim || extra.rows() != spec_.extra_dim ||
      task_state.cols() != extra.cols()) {
    throw ShapeError("network input shapes: expected task " +
                     std::to_string(spec_.task_dim) + " and extra " +
                     std::to_string(spec_.extra_dim) + " rows with equal batch");
  }
  if (spec_.kind == NetworkKind::kModular &&
      spec_.alignment == Alignment::kRelative && !anchors_) {
    throw ConfigError("relative network used before attaching anchors");
  }
}

Eigen::MatrixXd SplitNetwork::Forward(const Eigen::MatrixXd& task_state,
                                      const Eigen::MatrixXd& extra,
                                      const ForwardOptions& options,
                                      SplitTape* tape) const {
  CheckInputs(task_state, extra);
  const Eigen::Index batch = task_state.cols();
  SplitTape local;
  SplitTape& t = tape != nullptr ? *tape : local;
  t = SplitTape();
  t.batch = batch;

  if (spec_.kind == NetworkKind::kPlain) {
    Eigen::MatrixXd hidden =
        tape != nullptr ? task_module_.Forward(StackRows(task_state, extra), t.task)
                        : task_module_.Forward(StackRows(task_state, extra));
    Eigen::MatrixXd out = tape != nullptr ? robot_module_.Forward(hidden, t.robot)
                                          : robot_module_.Forward(hidden);
    t.recorded_ = tape != nullptr;
    return out;
  }

  Eigen::MatrixXd latent;
  if (spec_.alignment == Alignment::kRelative) {
    const Eigen::MatrixXd& anchor_states = anchors_->states();
    Eigen::MatrixXd inputs(spec_.task_dim, batch + anchor_states.cols());
    inputs.leftCols(batch) = task_state;
    inputs.rightCols(anchor_states.cols()) = anchor_states;
    Eigen::MatrixXd embedded = tape != nullptr
                                   ? task_module_.Forward(inputs, t.task)
                                   : task_module_.Forward(inputs);
    latent = RelativeRepresentation(embedded.leftCols(batch),
                                    embedded.rightCols(anchor_states.cols()),
                                    spec_.normalize,
                                    tape != nullptr ? &t.relrep : nullptr);
  } else {
    latent = tape != nullptr ? task_module_.Forward(task_state, t.task)
                             : task_module_.Forward(task_state);
  }
  if (options.training && spec_.dropout > 0.0) {
    if (options.rng == nullptr) throw UsageError("dropout needs an rng");
    const double keep = 1.0 - spec_.dropout;
    t.dropout_mask.resize(latent.rows(), latent.cols());
    for (Eigen::Index j = 0; j < latent.cols(); ++j) {
      for (Eigen::Index i = 0; i < latent.rows(); ++i) {
        t.dropout_mask(i, j) = options.rng->Uniform() < keep ? 1.0 / keep : 0.0;
      }
    }
    latent.array() *= t.dropout_mask.array();
  }
  Eigen::MatrixXd robot_in = StackRows(latent, extra);
  Eigen::MatrixXd out = tape != nullptr ? robot_module_.Forward(robot_in, t.robot)
                                        : robot_module_.Forward(robot_in);
  t.recorded_ = tape != nullptr;
  return out;
}

SplitGradient SplitNetwork::Backward(SplitTape& tape,
                                     const Eigen::MatrixXd& output_grad) const {
  if (!tape.recorded_) throw UsageError("backward on an unrecorded split tape");
  tape.recorded_ = false;
  SplitGradient grad;
  nn::MlpGradient robot = robot_module_.Backward(tape.robot, output_grad);
  grad.robot = std::move(robot.params);

  if (spec_.kind == NetworkKind::kPlain) {
    nn::MlpGradient top = task_module_.Backward(tape.task, robot.input);
    grad.task = std::move(top.params);
    grad.extra = top.input.bottomRows(spec_.extra_dim);
    return grad;
  }

  const int width = spec_.interface_dim();
  grad.extra = robot.input.bottomRows(spec_.extra_dim);
  Eigen::MatrixXd d_latent = robot.input.topRows(width);
  if (tape.dropout_mask.size() > 0) d_latent.array() *= tape.dropout_mask.array();

  Eigen::MatrixXd d_embedded;
  if (spec_.alignment == Alignment::kRelative) {
    const Eigen::Index k = anchors_->k();
    Eigen::MatrixXd d_states;
    Eigen::MatrixXd d_anchors;
    RelativeRepresentationBackward(tape.relrep, d_latent, &d_states,
                                   spec_.anchor_stop_gradient ? nullptr : &d_anchors);
    d_embedded.resize(spec_.latent_dim, tape.batch + k);
    d_embedded.leftCols(tape.batch) = d_states;
    if (spec_.anchor_stop_gradient) {
      d_embedded.rightCols(k).setZero();
    } else {
      d_embedded.rightCols(k) = d_anchors;
    }
  } else {
    d_embedded = std::move(d_latent);
  }
  grad.task = task_module_.Backward(tape.task, d_embedded).params;
  return grad;
}

Eigen::MatrixXd SplitNetwork::Embed(const Eigen::MatrixXd& task_state) const {
  if (spec_.kind != NetworkKind::kModular) {
    throw UsageError("Embed is defined for modular networks only");
  }
  return task_module_.Forward(task_state);
}

Eigen::MatrixXd SplitNetwork::InterfaceLatent(const Eigen::MatrixXd& task_state,
                                              const Eigen::MatrixXd& extra) const {
  CheckInputs(task_state, extra);
  if (spec_.kind == NetworkKind::kPlain) {
    return task_module_.Forward(StackRows(task_state, extra));
  }
  if (spec_.alignment == Alignment::kRelative) {
    return RelativeRepresentation(task_module_.Forward(task_state),
                                  task_module_.Forward(anchors_->states()),
                                  spec_.normalize);
  }
  return task_module_.Forward(task_state);
}

Eigen::MatrixXd SplitNetwork::RobotInput(const Eigen::MatrixXd& task_state,
                                         const Eigen::MatrixXd& extra) const {
  if (spec_.kind == NetworkKind::kPlain) {
    return InterfaceLatent(task_state, extra);
  }
  return StackRows(InterfaceLatent(task_state, extra), extra);
}

Eigen::MatrixXd SplitNetwork::RobotHidden(const Eigen::MatrixXd& task_state,
                                          const Eigen::MatrixXd& extra) const {
  if (robot_module_.num_layers() < 2) {
    throw ShapeError("robot module has no hidden layer");
  }
  return robot_module_.Activations(RobotInput(task_state, extra),
                                   robot_module_.num_layers() - 2);
}

}  // namespace stitchkit::policy
