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

#include "stitchkit/anchors/kmeans.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "stitchkit/errors.h"
#include "stitchkit/nn/random.h"

namespace stitchkit::anchors {
namespace {

struct Partition {
  Eigen::MatrixXd centroids;
  std::vector<int> assign;
  std::vector<int> counts;
};

double SqDist(const Eigen::MatrixXd& x, int i, const Eigen::MatrixXd& c, int j) {
  return (x.col(i) - c.col(j)).squaredNorm();
}

std::vector<int> SeedPlusPlus(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const int n = static_cast<int>(x.cols());
  std::vector<int> chosen = {static_cast<int>(rng.UniformInt(n))};
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = (x.col(i) - x.col(chosen[0])).squaredNorm();
  while (static_cast<int>(chosen.size()) < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    const double r = rng.Uniform() * total;
    int pick = -1;
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      cum += d2[i];
      pick = i;
      if (cum > r) break;
    }
    chosen.push_back(pick);
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.col(i) - x.col(pick)).squaredNorm());
    }
  }
  return chosen;
}

// Nearest centroid, lowest index on ties. Returns whether anything changed.
bool Assign(const Eigen::MatrixXd& x, Partition& p) {
  bool changed = false;
  const int k = static_cast<int>(p.centroids.cols());
  std::fill(p.counts.begin(), p.counts.end(), 0);
  for (int i = 0; i < x.cols(); ++i) {
    int best = 0;
    double best_d = SqDist(x, i, p.centroids, 0);
    for (int j = 1; j < k; ++j) {
      const double d = SqDist(x, i, p.centroids, j);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    changed = changed || p.assign[i] != best;
    p.assign[i] = best;
    ++p.counts[best];
  }
  return changed;
}

void RecomputeCentroids(const Eigen::MatrixXd& x, Partition& p) {
  p.centroids.setZero();
  for (int i = 0; i < x.cols(); ++i) p.centroids.col(p.assign[i]) += x.col(i);
  for (int j = 0; j < p.centroids.cols(); ++j) {
    if (p.counts[j] > 0) p.centroids.col(j) /= p.counts[j];
  }
}

// Empty clusters take the point farthest from its current centroid.
void RepairEmpty(const Eigen::MatrixXd& x, Partition& p) {
  for (int j = 0; j < p.centroids.cols(); ++j) {
    if (p.counts[j] > 0) continue;
    int far = -1;
    double far_d = -1.0;
    for (int i = 0; i < x.cols(); ++i) {
      if (p.counts[p.assign[i]] < 2) continue;
      const double d = SqDist(x, i, p.centroids, p.assign[i]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    --p.counts[p.assign[far]];
    p.assign[far] = j;
    p.counts[j] = 1;
    RecomputeCentroids(x, p);
  }
}

double Inertia(const Eigen::MatrixXd& x, const Partition& p) {
  double total = 0.0;
  for (int i = 0; i < x.cols(); ++i) total += SqDist(x, i, p.centroids, p.assign[i]);
  return total;
}

// One sweep of single-point transfers (Hartigan & Wong style cost test).
bool HartiganPass(const Eigen::MatrixXd& x, Partition& p) {
  bool moved = false;
  const int k = static_cast<int>(p.centroids.cols());
  for (int i = 0; i < x.cols(); ++i) {
    const int a = p.assign[i];
    const double na = p.counts[a];
    if (na < 2) continue;
    const double remove_gain = na / (na - 1.0) * SqDist(x, i, p.centroids, a);
    int best = -1;
    double best_delta = -1e-12 * (1.0 + remove_gain);
    for (int b = 0; b < k; ++b) {
      if (b == a) continue;
      const double nb = p.counts[b];
      const double delta = nb / (nb + 1.0) * SqDist(x, i, p.centroids, b) - remove_gain;
      if (delta < best_delta) {
        best_delta = delta;
        best = b;
      }
    }
    if (best < 0) continue;
    const double nb = p.counts[best];
    p.centroids.col(a) = (na * p.centroids.col(a) - x.col(i)) / (na - 1.0);
    p.centroids.col(best) = (nb * p.centroids.col(best) + x.col(i)) / (nb + 1.0);
    --p.counts[a];
    ++p.counts[best];
    p.assign[i] = best;
    moved = true;
  }
  if (moved) RecomputeCentroids(x, p);
  return moved;
}

KMeansResult RunOnce(const Eigen::MatrixXd& x, int k, Rng& rng,
                     const KMeansOptions& options) {
  Partition p;
  const std::vector<int> seeds = SeedPlusPlus(x, k, rng);
  p.centroids.resize(x.rows(), k);
  for (int j = 0; j < k; ++j) p.centroids.col(j) = x.col(seeds[j]);
  p.assign.assign(x.cols(), -1);
  p.counts.assign(k, 0);
  KMeansResult result;
  int iters = 0;
  for (int outer = 0; outer < options.max_iters; ++outer) {
    while (iters < options.max_iters) {
      ++iters;
      const bool changed = Assign(x, p);
      if (!changed && iters > 1) break;
      RepairEmpty(x, p);
      RecomputeCentroids(x, p);
      result.inertia_history.push_back(Inertia(x, p));
    }
    if (!options.hartigan || !HartiganPass(x, p)) break;
    result.inertia_history.push_back(Inertia(x, p));
  }
  result.centroids = std::move(p.centroids);
  result.assignments = std::move(p.assign);
  result.inertia = Inertia(x, Partition{result.centroids, result.assignments, {}});
  return result;
}

}  // namespace

int CountDistinct(const Eigen::MatrixXd& points) {
  std::vector<int> order(points.cols());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](int a, int b) {
    for (int r = 0; r < points.rows(); ++r) {
      if (points(r, a) != points(r, b)) return points(r, a) < points(r, b);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  int distinct = order.empty() ? 0 : 1;
  for (size_t i = 1; i < order.size(); ++i) {
    distinct += less(order[i - 1], order[i]) ? 1 : 0;
  }
  return distinct;
}

KMeansResult KMeans(const Eigen::MatrixXd& points, int k, uint64_t seed,
                    const KMeansOptions& options) {
  if (k <= 0) throw ConfigError("k-means needs k >= 1");
  if (points.cols() == 0) throw ConfigError("k-means on an empty point set");
  if (!points.allFinite()) throw ConfigError("k-means input contains non-finite values");
  const int distinct = CountDistinct(points);
  if (k > distinct) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(distinct) + " distinct points");
  }
  KMeansResult best;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Rng rng(MixSeed(seed, 0xc1u + static_cast<uint64_t>(r)));
    KMeansResult result = RunOnce(points, k, rng, options);
    result.restart = r;
    if (r == 0 || result.inertia < best.inertia * (1.0 - 1e-12) - 1e-300) {
      best = std::move(result);
    }
  }
  return best;
}

}  // namespace stitchkit::anchors
