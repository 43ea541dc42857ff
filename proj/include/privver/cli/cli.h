/*
 * Copyright 2026 The Privver Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVVER_CLI_CLI_H_
#define PRIVVER_CLI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace privver::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAbort = 2;
inline constexpr int kExitDenied = 3;

// Subcommands: keygen, synth, train, calibrate, serve, register, verify,
// bench. `--config <file>` reads key=value lines and applies them as flags;
// flags given on the command line take precedence.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

// Expands every `--config <file>` in args into --key=value arguments placed
// right after the subcommand name. Raises IoFailure or ParseError.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args);

}  // namespace privver::cli

#endif  // PRIVVER_CLI_CLI_H_
