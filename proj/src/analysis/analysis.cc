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

#include "stitchkit/analysis/analysis.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "stitchkit/envs/rollout.h"
#include "stitchkit/errors.h"
#include "stitchkit/nn/adam.h"
#include "stitchkit/nn/mlp.h"
#include "stitchkit/policy/relative_representation.h"

namespace stitchkit::analysis {
namespace {

constexpr int kEpisodeChunk = 64;

double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a == b) return 1.0;
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

// Per-row mean and standard deviation (1 where a row is constant).
void Standardizer(const Eigen::MatrixXd& x, Eigen::VectorXd* mean, Eigen::VectorXd* scale) {
  *mean = x.rowwise().mean();
  *scale = ((x.colwise() - *mean).array().square().rowwise().mean()).sqrt().matrix();
  for (Eigen::Index i = 0; i < scale->size(); ++i) {
    if (!((*scale)(i) > 1e-12)) (*scale)(i) = 1.0;
  }
}

Eigen::MatrixXd Apply(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                      const Eigen::VectorXd& scale) {
  return ((x.colwise() - mean).array().colwise() / scale.array()).matrix();
}

Eigen::MatrixXd Columns(const Eigen::MatrixXd& x, const std::vector<int>& idx, int begin,
                        int end) {
  Eigen::MatrixXd out(x.rows(), end - begin);
  for (int i = begin; i < end; ++i) out.col(i - begin) = x.col(idx[i]);
  return out;
}

}  // namespace

StateSample RolloutStates(const policy::Actor& actor, const envs::EnvSpec& env, int n_states,
                          uint64_t seed) {
  if (n_states <= 0) throw ConfigError("need at least one state");
  const int dt = envs::TaskStateDim(env.task.kind);
  const int dr = env.robot.n_joints();
  StateSample s;
  s.task.resize(dt, n_states);
  s.robot.resize(dr, n_states);
  s.end_effector.resize(2, n_states);
  const envs::BatchPolicy policy = [&actor](const Eigen::MatrixXd& t, const Eigen::MatrixXd& r) {
    return actor.DeterministicAction(t, r);
  };
  int filled = 0;
  for (int chunk = 0; filled < n_states; ++chunk) {
    std::vector<uint64_t> seeds;
    for (int i = 0; i < kEpisodeChunk; ++i) {
      seeds.push_back(envs::EpisodeSeed(seed, chunk * kEpisodeChunk + i));
    }
    envs::RunEpisodes(env, policy, seeds, [&](const envs::StepRecord& rec) {
      if (filled >= n_states) return;
      s.task.col(filled) = rec.state->task_state;
      s.robot.col(filled) = rec.state->robot_state;
      s.end_effector.col(filled) = envs::ForwardKinematics(env.robot, rec.state->robot_state);
      ++filled;
    });
  }
  return s;
}

Eigen::MatrixXd TaskLatents(const policy::SplitNetwork& net, const Eigen::MatrixXd& task_states,
                            LatentStage stage) {
  const policy::NetworkSpec& spec = net.spec();
  if (spec.kind != policy::NetworkKind::kModular) {
    throw UsageError("task latents are defined for modular networks");
  }
  if (stage == LatentStage::kEmbedding) return net.Embed(task_states);
  const Eigen::MatrixXd extra = Eigen::MatrixXd::Zero(spec.extra_dim, task_states.cols());
  return net.InterfaceLatent(task_states, extra);
}

LatentDump CollectLatents(const policy::Actor& actor, const envs::EnvSpec& env, int n_states,
                          uint64_t seed) {
  StateSample s = RolloutStates(actor, env, n_states, seed);
  LatentDump dump;
  dump.latents = actor.network().InterfaceLatent(s.task, s.robot);
  dump.task_states = std::move(s.task);
  dump.labels.resize(n_states);
  for (int i = 0; i < n_states; ++i) {
    dump.labels[i] = envs::GoalQuadrant(dump.task_states.col(i).tail<2>());
  }
  return dump;
}

PcaResult PcaProject(const Eigen::MatrixXd& x, int out_dims) {
  const Eigen::Index d = x.rows();
  const Eigen::Index n = x.cols();
  if (out_dims <= 0 || out_dims > d || n <= out_dims) {
    throw ShapeError("pca: need 0 < out_dims <= d and more samples than out_dims");
  }
  PcaResult r;
  r.mean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - r.mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double total = sigma.squaredNorm();
  r.components = svd.matrixU().leftCols(out_dims);
  for (int k = 0; k < out_dims; ++k) {
    Eigen::Index arg = 0;
    r.components.col(k).cwiseAbs().maxCoeff(&arg);
    if (r.components(arg, k) < 0.0) r.components.col(k) *= -1.0;
  }
  r.explained_variance_ratio.resize(out_dims);
  const double scale = std::max(1.0, centered.cwiseAbs().maxCoeff());
  r.degenerate = !(std::sqrt(total) > 1e-12 * scale * std::sqrt(static_cast<double>(n)));
  if (r.degenerate) {
    r.projection = Eigen::MatrixXd::Zero(out_dims, n);
    r.explained_variance_ratio.setConstant(std::numeric_limits<double>::quiet_NaN());
    return r;
  }
  for (int k = 0; k < out_dims; ++k) {
    r.explained_variance_ratio(k) = sigma(k) * sigma(k) / total;
  }
  r.projection = r.components.transpose() * centered;
  return r;
}

DistanceReport PairwiseDistances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("pairwise distances: latent matrices differ in shape");
  }
  if (a.cols() == 0) throw ShapeError("pairwise distances: no samples");
  DistanceReport r;
  r.samples = static_cast<int>(a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    r.mean_cosine += 1.0 - CosineSimilarity(a.col(i), b.col(i));
    r.mean_l2 += (a.col(i) - b.col(i)).norm();
  }
  r.mean_cosine /= static_cast<double>(a.cols());
  r.mean_l2 /= static_cast<double>(a.cols());
  return r;
}

DistanceReport PairwiseDistances(const std::vector<Eigen::MatrixXd>& latents) {
  const int m = static_cast<int>(latents.size());
  if (m < 2) throw ShapeError("pairwise distances need at least two latent sets");
  DistanceReport r;
  r.cosine_matrix = Eigen::MatrixXd::Zero(m, m);
  r.l2_matrix = Eigen::MatrixXd::Zero(m, m);
  int pairs = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      DistanceReport p = PairwiseDistances(latents[i], latents[j]);
      r.cosine_matrix(i, j) = r.cosine_matrix(j, i) = p.mean_cosine;
      r.l2_matrix(i, j) = r.l2_matrix(j, i) = p.mean_l2;
      r.mean_cosine += p.mean_cosine;
      r.mean_l2 += p.mean_l2;
      r.samples = p.samples;
      ++pairs;
    }
  }
  r.mean_cosine /= pairs;
  r.mean_l2 /= pairs;
  return r;
}

std::string DistanceReport::ToText() const {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "samples: " << samples << "\n";
  os << "mean_cosine_distance: " << mean_cosine << "\n";
  os << "mean_l2_distance: " << mean_l2 << "\n";
  if (cosine_matrix.size() > 0) {
    os << "cosine_matrix:\n" << cosine_matrix << "\n";
    os << "l2_matrix:\n" << l2_matrix << "\n";
  }
  return os.str();
}

nlohmann::json DistanceReport::ToJson() const {
  nlohmann::json j = {{"samples", samples}, {"mean_cosine", mean_cosine}, {"mean_l2", mean_l2}};
  if (cosine_matrix.size() > 0) {
    nlohmann::json c = nlohmann::json::array();
    nlohmann::json l = nlohmann::json::array();
    for (Eigen::Index i = 0; i < cosine_matrix.rows(); ++i) {
      c.push_back(std::vector<double>(cosine_matrix.row(i).begin(), cosine_matrix.row(i).end()));
      l.push_back(std::vector<double>(l2_matrix.row(i).begin(), l2_matrix.row(i).end()));
    }
    j["cosine_matrix"] = c;
    j["l2_matrix"] = l;
  }
  return j;
}

const TargetScore& RegressionReport::Get(const std::string& name) const {
  for (const TargetScore& t : targets) {
    if (t.name == name) return t;
  }
  throw UsageError("no regression target named '" + name + "'");
}

std::string RegressionReport::ToText() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "train: " << train_size << "  test: " << test_size << "\n";
  os << "target           r2     success\n";
  for (const TargetScore& t : targets) {
    os << std::left << std::setw(14) << t.name << std::right << std::setw(8) << t.r2
       << std::setw(10) << t.success_rate << "\n";
  }
  return os.str();
}

nlohmann::json RegressionReport::ToJson() const {
  nlohmann::json j = {{"train_size", train_size}, {"test_size", test_size}};
  for (const TargetScore& t : targets) {
    j["targets"][t.name] = {{"r2", t.r2}, {"success_rate", t.success_rate}};
  }
  return j;
}

RegressionReport FitRegression(const Eigen::MatrixXd& features,
                               const std::vector<std::pair<std::string, Eigen::MatrixXd>>& targets,
                               uint64_t seed, const RegressionOptions& options) {
  const int n = static_cast<int>(features.cols());
  if (n < 10) throw ConfigError("regression needs at least 10 points");
  const int n_train = static_cast<int>(std::lround(options.train_fraction * n));
  if (n_train <= 0 || n_train >= n) throw ConfigError("train split leaves an empty side");
  Rng rng(MixSeed(seed, 0x4e6));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformInt(static_cast<uint64_t>(i) + 1)]);
  }
  const Eigen::MatrixXd x_train_raw = Columns(features, order, 0, n_train);
  const Eigen::MatrixXd x_test_raw = Columns(features, order, n_train, n);
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_scale;
  Standardizer(x_train_raw, &x_mean, &x_scale);
  const Eigen::MatrixXd x_train = Apply(x_train_raw, x_mean, x_scale);
  const Eigen::MatrixXd x_test = Apply(x_test_raw, x_mean, x_scale);

  RegressionReport report;
  report.train_size = n_train;
  report.test_size = n - n_train;
  for (const auto& [name, labels] : targets) {
    if (labels.cols() != n) throw ShapeError("regression labels and features differ in count");
    const Eigen::MatrixXd y_train_raw = Columns(labels, order, 0, n_train);
    const Eigen::MatrixXd y_test = Columns(labels, order, n_train, n);
    Eigen::VectorXd y_mean;
    Eigen::VectorXd y_scale;
    Standardizer(y_train_raw, &y_mean, &y_scale);
    const Eigen::MatrixXd y_train = Apply(y_train_raw, y_mean, y_scale);

    const int widths[] = {static_cast<int>(features.rows()), options.hidden, options.hidden,
                          static_cast<int>(labels.rows())};
    Rng init(MixSeed(seed, 0x7e0 + report.targets.size()));
    nn::Mlp net = nn::Mlp::Create(widths, nn::Activation::kRelu, nn::Activation::kIdentity, init);
    nn::Adam adam(net.num_params(), {options.learning_rate, 0.9, 0.999, 1e-8});
    Eigen::VectorXd params = net.Flatten();
    const int batch = options.batch_size > 0 ? std::min(options.batch_size, n_train) : n_train;
    std::vector<int> perm(n_train);
    std::iota(perm.begin(), perm.end(), 0);
    Rng shuffle(MixSeed(seed, 0x5b0 + report.targets.size()));
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      if (batch < n_train) {
        for (int i = n_train - 1; i > 0; --i) {
          std::swap(perm[i], perm[shuffle.UniformInt(static_cast<uint64_t>(i) + 1)]);
        }
      }
      for (int start = 0; start < n_train; start += batch) {
        const int end = std::min(n_train, start + batch);
        const Eigen::MatrixXd xb = batch < n_train ? Columns(x_train, perm, start, end) : x_train;
        const Eigen::MatrixXd yb = batch < n_train ? Columns(y_train, perm, start, end) : y_train;
        nn::GradientTape tape;
        const Eigen::MatrixXd pred = net.Forward(xb, tape);
        const Eigen::MatrixXd grad = (2.0 / static_cast<double>(yb.size())) * (pred - yb);
        adam.Step(params, net.Backward(tape, grad).params);
        net.Assign(params);
      }
    }
    const Eigen::MatrixXd pred =
        (net.Forward(x_test).array().colwise() * y_scale.array()).colwise() + y_mean.array();
    const double ss_res = (pred - y_test).squaredNorm();
    const double ss_tot = (y_test.colwise() - y_test.rowwise().mean()).squaredNorm();
    TargetScore score;
    score.name = name;
    score.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    int hits = 0;
    for (Eigen::Index i = 0; i < pred.cols(); ++i) {
      hits += (pred.col(i) - y_test.col(i)).norm() < options.success_radius;
    }
    score.success_rate = static_cast<double>(hits) / static_cast<double>(pred.cols());
    report.targets.push_back(score);
  }
  return report;
}

RegressionReport RegressionProbe(const policy::Actor& actor, const envs::EnvSpec& env,
                                 int n_points, uint64_t seed, const RegressionOptions& options) {
  if (n_points < 10) throw ConfigError("regression probe needs at least 10 points");
  StateSample s = RolloutStates(actor, env, n_points, seed);
  const Eigen::MatrixXd features = actor.network().RobotHidden(s.task, s.robot);
  std::vector<std::pair<std::string, Eigen::MatrixXd>> targets;
  if (env.task.kind == envs::TaskKind::kPush) targets.emplace_back("object", s.task.topRows(2));
  targets.emplace_back("goal", s.task.bottomRows(2));
  targets.emplace_back("end_effector", s.end_effector);
  return FitRegression(features, targets, seed, options);
}

std::string LatentCsv(const LatentDump& dump, const Eigen::MatrixXd* projection) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "index,label";
  for (Eigen::Index i = 0; i < dump.task_states.rows(); ++i) os << ",task_" << i;
  for (Eigen::Index i = 0; i < dump.latents.rows(); ++i) os << ",latent_" << i;
  if (projection != nullptr) {
    for (Eigen::Index i = 0; i < projection->rows(); ++i) os << ",pc_" << i;
  }
  os << "\n";
  for (int j = 0; j < dump.size(); ++j) {
    os << j << "," << dump.labels[j];
    for (Eigen::Index i = 0; i < dump.task_states.rows(); ++i) os << "," << dump.task_states(i, j);
    for (Eigen::Index i = 0; i < dump.latents.rows(); ++i) os << "," << dump.latents(i, j);
    if (projection != nullptr) {
      for (Eigen::Index i = 0; i < projection->rows(); ++i) os << "," << (*projection)(i, j);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace stitchkit::analysis
