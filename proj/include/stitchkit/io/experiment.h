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

#ifndef STITCHKIT_IO_EXPERIMENT_H_
#define STITCHKIT_IO_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stitchkit/io/run_config.h"

namespace stitchkit::io {

// Line-delimited JSON records. Each Append rewrites the file atomically, so
// a crash leaves the previous complete log.
class MetricsLog {
 public:
  explicit MetricsLog(std::filesystem::path path) : path_(std::move(path)) {}

  void Append(const nlohmann::json& record);
  const std::vector<nlohmann::json>& records() const { return records_; }
  const std::filesystem::path& path() const { return path_; }

  static std::vector<nlohmann::json> Read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::vector<nlohmann::json> records_;
};

// Exclusive advisory lock on a file; throws ConfigError if already held.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path);
  ~FileLock();
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

// <root>/<first 12 hex digits of the config hash>-s<seed>, holding the
// config copy, checkpoints and logs. Holds an exclusive advisory lock on
// <dir>/.lock for its lifetime; a second holder gets a ConfigError.
class ExperimentDir {
 public:
  ExperimentDir(const std::filesystem::path& root, const RunConfig& config);
  ExperimentDir(const ExperimentDir&) = delete;
  ExperimentDir& operator=(const ExperimentDir&) = delete;

  static std::string Name(const RunConfig& config);

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path checkpoint() const { return path_ / "checkpoint.skc"; }
  std::filesystem::path metrics() const { return path_ / "metrics.jsonl"; }
  std::filesystem::path config_copy() const { return path_ / "config.yaml"; }

 private:
  std::filesystem::path path_;
  std::unique_ptr<FileLock> lock_;
};

}  // namespace stitchkit::io

#endif  // STITCHKIT_IO_EXPERIMENT_H_
