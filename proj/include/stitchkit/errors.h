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

#ifndef STITCHKIT_ERRORS_H_
#define STITCHKIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace stitchkit {

// Base of every error raised by the library. The CLI maps each subclass to a
// process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or vector dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, preset id, or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. replaying a consumed gradient tape.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Modules or anchor sets that cannot be combined.
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

// NaN or infinity detected during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace stitchkit

#endif  // STITCHKIT_ERRORS_H_
