// Copyright (c) 2026 The sqagen Authors
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

#ifndef SQAGEN_CLI_HPP_
#define SQAGEN_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace sqagen {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (args[0] is the program name). Machine output
// goes to `out`, diagnostics to `err`. stdin is used only by `parse`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace sqagen

#endif  // SQAGEN_CLI_HPP_
