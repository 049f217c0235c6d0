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

#ifndef STITCHKIT_CLI_CLI_H_
#define STITCHKIT_CLI_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace stitchkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitIncompatible = 3;
inline constexpr int kExitNumerical = 4;

// Runs the stitchkit command line with `args` (without the program name),
// writing reports to `out` and diagnostics to `err`. Returns the exit code.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stitchkit::cli

#endif  // STITCHKIT_CLI_CLI_H_
