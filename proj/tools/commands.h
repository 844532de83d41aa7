// Copyright 2026 The FM3Q Authors.
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

#ifndef FM3Q_TOOLS_COMMANDS_H_
#define FM3Q_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace fm3q::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 1;
inline constexpr int kExitRuntime = 2;

struct Options {
  std::string config;       // run/ablate config, or a game document for oracle/eval
  std::string out;          // output directory; overrides the config's "out"
  std::optional<uint64_t> seed;
  double tol = 1e-8;
  std::string mode = "roundrobin";  // eval: roundrobin | nashconv | trend | vsbot
  std::string checkpoints;  // eval: directory of checkpoint files
  int64_t episodes_per_pair = 1;
};

// Each command reports errors on `err` and returns an exit code: 1 for
// schema or usage errors (with the offending field path), 2 for failures
// while running.
int RunTrain(const Options& options, std::ostream& out, std::ostream& err);
int RunOracle(const Options& options, std::ostream& out, std::ostream& err);
int RunEval(const Options& options, std::ostream& out, std::ostream& err);
int RunAblate(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace fm3q::cli

#endif  // FM3Q_TOOLS_COMMANDS_H_
