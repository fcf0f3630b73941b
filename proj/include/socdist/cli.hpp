// Copyright (c) 2026 The socdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>

namespace socdist {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;  // I/O failure during a run
inline constexpr int kExitUsage = 2;    // bad flags, missing inputs, invalid config

/// Entry point for the `socdist` tool: analyze, serve, evaluate, calibrate.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace socdist
