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

#include "stitchkit/rl/replay.h"

#include <algorithm>

#include "stitchkit/envs/planar_arm.h"
#include "stitchkit/errors.h"

namespace stitchkit::rl {

Eigen::Vector2d Episode::goal() const { return task.col(0).tail<2>(); }

Transition Episode::At(int t) const {
  Transition tr;
  tr.task = task.col(t);
  tr.robot = robot.col(t);
  tr.action = action.col(t);
  tr.reward = reward(t);
  tr.next_task = task.col(t + 1);
  tr.next_robot = robot.col(t + 1);
  tr.achieved_goal = achieved.col(t);
  tr.goal = task.col(t).tail<2>();
  tr.done = tr.reward == 0.0;
  return tr;
}

Transition Episode::Relabeled(int t, const Eigen::Vector2d& goal,
                              double success_radius) const {
  Transition tr = At(t);
  tr.task.tail<2>() = goal;
  tr.next_task.tail<2>() = goal;
  tr.goal = goal;
  tr.reward = envs::ComputeReward(tr.achieved_goal, goal, success_radius);
  tr.done = tr.reward == 0.0;
  return tr;
}

std::vector<Transition> HerRelabel(const Episode& episode, int k_relabel,
                                   double success_radius, Rng& rng) {
  const int n = episode.length();
  std::vector<Transition> out;
  out.reserve(static_cast<size_t>(n) * (1 + std::max(0, k_relabel)));
  for (int t = 0; t < n; ++t) out.push_back(episode.At(t));
  for (int t = 0; t < n; ++t) {
    for (int c = 0; c < k_relabel; ++c) {
      const int future = t + static_cast<int>(rng.UniformInt(n - t));
      out.push_back(episode.Relabeled(t, episode.achieved.col(future), success_radius));
    }
  }
  return out;
}

TransitionBatch MakeBatch(const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw UsageError("empty transition batch");
  const Transition& f = transitions.front();
  const int b = static_cast<int>(transitions.size());
  TransitionBatch batch;
  batch.task.resize(f.task.size(), b);
  batch.robot.resize(f.robot.size(), b);
  batch.action.resize(f.action.size(), b);
  batch.reward.resize(b);
  batch.next_task.resize(f.task.size(), b);
  batch.next_robot.resize(f.robot.size(), b);
  batch.done.resize(b);
  batch.achieved.resize(2, b);
  batch.goal.resize(2, b);
  for (int i = 0; i < b; ++i) {
    const Transition& t = transitions[i];
    batch.task.col(i) = t.task;
    batch.robot.col(i) = t.robot;
    batch.action.col(i) = t.action;
    batch.reward(i) = t.reward;
    batch.next_task.col(i) = t.next_task;
    batch.next_robot.col(i) = t.next_robot;
    batch.done(i) = t.done ? 1.0 : 0.0;
    batch.achieved.col(i) = t.achieved_goal;
    batch.goal.col(i) = t.goal;
  }
  return batch;
}

EpisodeBuffer::EpisodeBuffer(int64_t capacity, int k_relabel, double success_radius)
    : capacity_(capacity), k_relabel_(k_relabel), success_radius_(success_radius) {
  if (capacity <= 0) throw ConfigError("replay capacity must be positive");
  if (k_relabel < 0) throw ConfigError("k_relabel must be >= 0");
}

void EpisodeBuffer::Add(Episode episode) {
  if (episode.length() <= 0) throw UsageError("cannot store an empty episode");
  if (episode.task.cols() != episode.length() + 1 ||
      episode.robot.cols() != episode.length() + 1 ||
      episode.achieved.cols() != episode.length() ||
      episode.reward.size() != episode.length()) {
    throw ShapeError("episode arrays have inconsistent lengths");
  }
  size_ += episode.length();
  episodes_.push_back(std::move(episode));
  while (size_ > capacity_ && episodes_.size() > 1) {
    size_ -= episodes_.front().length();
    episodes_.pop_front();
  }
  ends_.clear();
  int64_t total = 0;
  for (const Episode& e : episodes_) ends_.push_back(total += e.length());
}

TransitionBatch EpisodeBuffer::Sample(int batch_size, Rng& rng) const {
  if (size_ == 0) throw UsageError("sampling from an empty replay buffer");
  if (batch_size <= 0) throw UsageError("batch size must be positive");
  const Episode& first = episodes_.front();
  const int dt = static_cast<int>(first.task.rows());
  const int dr = static_cast<int>(first.robot.rows());
  const int na = static_cast<int>(first.action.rows());
  TransitionBatch b;
  b.task.resize(dt, batch_size);
  b.robot.resize(dr, batch_size);
  b.action.resize(na, batch_size);
  b.reward.resize(batch_size);
  b.next_task.resize(dt, batch_size);
  b.next_robot.resize(dr, batch_size);
  b.done.resize(batch_size);
  b.achieved.resize(2, batch_size);
  b.goal.resize(2, batch_size);
  const double relabel_p = static_cast<double>(k_relabel_) / (k_relabel_ + 1.0);
  for (int i = 0; i < batch_size; ++i) {
    const int64_t flat = static_cast<int64_t>(rng.UniformInt(size_));
    const int e = static_cast<int>(std::upper_bound(ends_.begin(), ends_.end(), flat) -
                                   ends_.begin());
    const Episode& ep = episodes_[e];
    const int t = static_cast<int>(flat - (e == 0 ? 0 : ends_[e - 1]));
    const Eigen::Vector2d goal = ep.task.col(t).tail<2>();
    const Eigen::Vector2d achieved = ep.achieved.col(t);
    Eigen::Vector2d new_goal = goal;
    if (k_relabel_ > 0 && rng.Uniform() < relabel_p) {
      const int future = t + static_cast<int>(rng.UniformInt(ep.length() - t));
      new_goal = ep.achieved.col(future);
    }
    b.task.col(i) = ep.task.col(t);
    b.next_task.col(i) = ep.task.col(t + 1);
    b.task.col(i).tail<2>() = new_goal;
    b.next_task.col(i).tail<2>() = new_goal;
    b.robot.col(i) = ep.robot.col(t);
    b.next_robot.col(i) = ep.robot.col(t + 1);
    b.action.col(i) = ep.action.col(t);
    b.reward(i) = envs::ComputeReward(achieved, new_goal, success_radius_);
    b.done(i) = b.reward(i) == 0.0 ? 1.0 : 0.0;
    b.achieved.col(i) = achieved;
    b.goal.col(i) = new_goal;
  }
  return b;
}

}  // namespace stitchkit::rl
