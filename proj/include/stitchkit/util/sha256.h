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

#ifndef STITCHKIT_UTIL_SHA256_H_
#define STITCHKIT_UTIL_SHA256_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stitchkit {

// Lower-case hex SHA-256 digest.
std::string Sha256Hex(std::span<const uint8_t> bytes);
std::string Sha256Hex(std::string_view text);

// Little-endian encoders used by every binary format in the project.
void AppendU32(std::vector<uint8_t>& out, uint32_t value);
void AppendU64(std::vector<uint8_t>& out, uint64_t value);
void AppendF64(std::vector<uint8_t>& out, double value);

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint32_t U32();
  uint64_t U64();
  double F64();
  std::span<const uint8_t> Take(size_t n);
  size_t remaining() const { return bytes_.size() - pos_; }
  size_t position() const { return pos_; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace stitchkit

#endif  // STITCHKIT_UTIL_SHA256_H_
