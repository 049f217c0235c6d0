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

#ifndef STITCHKIT_POLICY_NETWORK_H_
#define STITCHKIT_POLICY_NETWORK_H_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "stitchkit/nn/mlp.h"
#include "stitchkit/nn/random.h"
#include "stitchkit/policy/anchor_set.h"
#include "stitchkit/policy/relative_representation.h"

namespace stitchkit::policy {

enum class Alignment { kNone, kRelative };
enum class NetworkKind { kModular, kPlain };

std::string AlignmentName(Alignment alignment);
Alignment ParseAlignment(const std::string& name);

// Shape of one stitchable network. A modular network is
//   robot_module(interface(task_module(s_T)) ++ extra)
// where interface is the relative representation against the anchor set or
// the identity, optionally followed by dropout. A plain network is a single
// MLP on s_T ++ extra whose first `split_layer` layers form the "task" half.
// `extra` is s_R for actors and s_R ++ action for critics.
struct NetworkSpec {
  NetworkKind kind = NetworkKind::kModular;
  int task_dim = 0;
  int extra_dim = 0;
  int output_dim = 0;
  nn::Activation hidden_activation = nn::Activation::kRelu;

  // Modular.
  std::vector<int> task_hidden = {64, 64};
  int latent_dim = 16;
  std::vector<int> robot_hidden = {64, 64};
  Alignment alignment = Alignment::kRelative;
  bool normalize = true;
  double dropout = 0.0;
  bool anchor_stop_gradient = false;
  std::string anchor_hash;

  // Plain.
  std::vector<int> plain_hidden;
  int split_layer = 0;

  // Width of the robot module's latent input.
  int interface_dim() const;
  void Validate() const;

  nlohmann::json ToJson() const;
  static NetworkSpec FromJson(const nlohmann::json& j);
};

struct ForwardOptions {
  bool training = false;  // enables dropout
  Rng* rng = nullptr;     // required when training with dropout
};

class SplitTape {
 public:
  bool recorded() const { return recorded_; }

 private:
  friend class SplitNetwork;
  nn::GradientTape task;
  nn::GradientTape robot;
  RelRepCache relrep;
  Eigen::MatrixXd dropout_mask;
  Eigen::Index batch = 0;
  bool recorded_ = false;
};

struct SplitGradient {
  Eigen::VectorXd task;    // flat task-module (or top-half) gradient
  Eigen::VectorXd robot;   // flat robot-module (or bottom-half) gradient
  Eigen::MatrixXd extra;   // d loss / d extra input, extra_dim x B
};

class SplitNetwork {
 public:
  SplitNetwork() = default;
  SplitNetwork(NetworkSpec spec, Rng& rng);
  SplitNetwork(NetworkSpec spec, nn::Mlp task_module, nn::Mlp robot_module);

  const NetworkSpec& spec() const { return spec_; }
  const nn::Mlp& task_module() const { return task_module_; }
  const nn::Mlp& robot_module() const { return robot_module_; }
  void SetTaskParams(const Eigen::VectorXd& flat) { task_module_.Assign(flat); }
  void SetRobotParams(const Eigen::VectorXd& flat) { robot_module_.Assign(flat); }

  // Verifies the anchor hash against the spec. Throws IncompatibleError on
  // mismatch and ShapeError if the anchors do not fit the task module.
  void AttachAnchors(std::shared_ptr<const AnchorSet> anchors);
  const std::shared_ptr<const AnchorSet>& anchors() const { return anchors_; }

  Eigen::MatrixXd Forward(const Eigen::MatrixXd& task_state,
                          const Eigen::MatrixXd& extra,
                          const ForwardOptions& options = {},
                          SplitTape* tape = nullptr) const;
  SplitGradient Backward(SplitTape& tape, const Eigen::MatrixXd& output_grad) const;

  // Task module output before alignment (modular only).
  Eigen::MatrixXd Embed(const Eigen::MatrixXd& task_state) const;
  // Robot-module input latent: after alignment for modular networks, the
  // top-half output for plain networks (which also needs `extra`).
  Eigen::MatrixXd InterfaceLatent(const Eigen::MatrixXd& task_state,
                                  const Eigen::MatrixXd& extra) const;
  // Activations of the robot module's last hidden layer.
  Eigen::MatrixXd RobotHidden(const Eigen::MatrixXd& task_state,
                              const Eigen::MatrixXd& extra) const;

 private:
  void CheckInputs(const Eigen::MatrixXd& task_state,
                   const Eigen::MatrixXd& extra) const;
  Eigen::MatrixXd RobotInput(const Eigen::MatrixXd& task_state,
                             const Eigen::MatrixXd& extra) const;

  NetworkSpec spec_;
  nn::Mlp task_module_;
  nn::Mlp robot_module_;
  std::shared_ptr<const AnchorSet> anchors_;
};

}  // namespace stitchkit::policy

#endif  // STITCHKIT_POLICY_NETWORK_H_
