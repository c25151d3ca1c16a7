// Copyright 2026 The Repulse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REPULSE_CLI_H_
#define REPULSE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace repulse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kVersion = "0.1.0";

// Parses `args` (without the program name) and runs the subcommand.
// Machine-readable output goes to `out`, diagnostics to `err`.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace repulse

#endif  // REPULSE_CLI_H_
