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

#ifndef STITCHKIT_ANCHORS_KMEANS_H_
#define STITCHKIT_ANCHORS_KMEANS_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace stitchkit::anchors {

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 300;
  // Single-point transfer refinement after Lloyd converges.
  bool hartigan = true;
};

struct KMeansResult {
  Eigen::MatrixXd centroids;  // d x k
  std::vector<int> assignments;
  double inertia = 0.0;
  // Inertia after every Lloyd or transfer pass of the winning restart.
  std::vector<double> inertia_history;
  int restart = 0;
};

// k-means++ seeding, Lloyd iterations, then Hartigan transfers, repeated
// until neither changes the partition. Best of `restarts`; equal inertia
// keeps the earlier restart. Points are columns. Throws ConfigError if k
// exceeds the number of distinct points.
KMeansResult KMeans(const Eigen::MatrixXd& points, int k, uint64_t seed,
                    const KMeansOptions& options = {});

int CountDistinct(const Eigen::MatrixXd& points);

}  // namespace stitchkit::anchors

#endif  // STITCHKIT_ANCHORS_KMEANS_H_
