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

#include "stitchkit/anchors/select.h"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>

#include "stitchkit/anchors/kmeans.h"
#include "stitchkit/errors.h"
#include "stitchkit/util/file_io.h"
#include "stitchkit/util/sha256.h"

namespace stitchkit::anchors {
namespace {

constexpr char kMagic[8] = {'S', 'K', 'A', 'N', 'C', 'H', 'O', 'R'};
constexpr uint32_t kVersion = 1;

}  // namespace

policy::AnchorSet SelectAnchors(const Eigen::MatrixXd& corpus,
                                const Eigen::MatrixXd& centroids,
                                std::vector<int>* chosen) {
  if (corpus.rows() != centroids.rows()) {
    throw ShapeError("centroids and corpus states differ in dimension");
  }
  const int k = static_cast<int>(centroids.cols());
  if (CountDistinct(corpus) < k) {
    throw ConfigError("corpus has fewer distinct states than centroids");
  }
  const int n = static_cast<int>(corpus.cols());
  Eigen::MatrixXd anchors(corpus.rows(), k);
  std::vector<int> picked;
  std::vector<int> order(n);
  std::vector<double> dist(n);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) dist[i] = (corpus.col(i) - centroids.col(j)).squaredNorm();
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist[a] < dist[b]; });
    for (int i : order) {
      bool used = false;
      for (int p : picked) used = used || corpus.col(p) == corpus.col(i);
      if (used) continue;
      picked.push_back(i);
      anchors.col(j) = corpus.col(i);
      break;
    }
  }
  if (chosen != nullptr) *chosen = picked;
  return policy::AnchorSet(std::move(anchors));
}

policy::AnchorSet BuildAnchorSet(const StateCorpus& corpus, int k, uint64_t seed,
                                 bool balance) {
  const StateCorpus pool = balance ? Balance(corpus, seed) : corpus;
  KMeansResult clusters = KMeans(pool.states, k, seed);
  return SelectAnchors(pool.states, clusters.centroids);
}

void SaveAnchorSet(const std::filesystem::path& path, const policy::AnchorSet& anchors) {
  std::vector<uint8_t> bytes(kMagic, kMagic + sizeof(kMagic));
  AppendU32(bytes, kVersion);
  const std::vector<uint8_t> payload = anchors.Serialize();
  bytes.insert(bytes.end(), payload.begin(), payload.end());
  const std::string& hash = anchors.hash();
  bytes.insert(bytes.end(), hash.begin(), hash.end());
  WriteFileAtomic(path, bytes);
}

policy::AnchorSet LoadAnchorSet(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  ByteReader reader(bytes);
  auto magic = reader.Take(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError(path.string() + " is not an anchor file");
  }
  const uint32_t version = reader.U32();
  if (version != kVersion) {
    throw ConfigError(path.string() + ": unsupported anchor file version " +
                      std::to_string(version));
  }
  const size_t start = reader.position();
  const uint64_t k = reader.U64();
  const uint64_t d = reader.U64();
  if (k == 0 || d == 0 || k > (1u << 20) || d > (1u << 20)) {
    throw ConfigError(path.string() + ": implausible anchor dimensions");
  }
  Eigen::MatrixXd states(d, k);
  for (uint64_t j = 0; j < k; ++j) {
    for (uint64_t i = 0; i < d; ++i) states(i, j) = reader.F64();
  }
  const size_t end = reader.position();
  auto stored = reader.Take(64);
  if (reader.remaining() != 0) throw ConfigError(path.string() + ": trailing bytes");
  const std::string expected(stored.begin(), stored.end());
  const std::string actual =
      Sha256Hex(std::span<const uint8_t>(bytes.data() + start, end - start));
  if (expected != actual) {
    throw ConfigError(path.string() + ": anchor payload hash mismatch (corrupt file)");
  }
  return policy::AnchorSet(std::move(states));
}

}  // namespace stitchkit::anchors
