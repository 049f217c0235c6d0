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

#include "stitchkit/io/experiment.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "stitchkit/errors.h"
#include "stitchkit/util/file_io.h"

namespace stitchkit::io {

void MetricsLog::Append(const nlohmann::json& record) {
  records_.push_back(record);
  std::string text;
  for (const nlohmann::json& r : records_) text += r.dump() + "\n";
  WriteFileAtomic(path_, text);
}

std::vector<nlohmann::json> MetricsLog::Read(const std::filesystem::path& path) {
  std::istringstream in(ReadFileText(path));
  std::vector<nlohmann::json> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

FileLock::FileLock(const std::filesystem::path& path) {
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw ConfigError("cannot open lock file " + path.string() + ": " + std::strerror(errno));
  }
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw ConfigError(path.parent_path().string() + " is in use by another run");
  }
}

FileLock::~FileLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::string ExperimentDir::Name(const RunConfig& config) {
  return config.Hash().substr(0, 12) + "-s" + std::to_string(config.seed);
}

ExperimentDir::ExperimentDir(const std::filesystem::path& root, const RunConfig& config)
    : path_(root / Name(config)) {
  std::filesystem::create_directories(path_);
  lock_ = std::make_unique<FileLock>(path_ / ".lock");
  WriteFileAtomic(config_copy(), config.ToYaml());
}

}  // namespace stitchkit::io
