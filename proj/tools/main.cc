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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

int main(int argc, char** argv) {
  CLI::App app{"Factorized multi-agent minimax Q-learning for two-team zero-sum Markov games"};
  app.require_subcommand(1);
  fm3q::cli::Options o;
  uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "Config or game JSON file")->required();
    cmd->add_option("--out", o.out, "Output directory");
  };

  CLI::App* train = app.add_subcommand("train", "Train with fm3q, iql or jminimax");
  add_common(train);
  CLI::Option* train_seed = train->add_option("--seed", seed, "Overrides the config seed");

  CLI::App* oracle = app.add_subcommand("oracle", "Solve the superb Q by value iteration");
  add_common(oracle);
  oracle->add_option("--tol", o.tol, "Sup-norm stopping tolerance");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a directory of checkpoints");
  add_common(eval);
  eval->add_option("--checkpoints", o.checkpoints, "Checkpoint directory")->required();
  eval->add_option("--mode", o.mode, "roundrobin | nashconv | trend | vsbot")
      ->check(CLI::IsMember({"roundrobin", "nashconv", "trend", "vsbot"}));
  eval->add_option("--tol", o.tol, "Oracle tolerance for nashconv mode");
  eval->add_option("--episodes", o.episodes_per_pair, "Matches per ordered pair");
  CLI::Option* eval_seed = eval->add_option("--seed", seed, "Match sampling seed");

  CLI::App* ablate = app.add_subcommand("ablate", "Replay buffer size ablation");
  add_common(ablate);
  CLI::Option* ablate_seed = ablate->add_option("--seed", seed, "Overrides the config seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fm3q::cli::kExitSchema;
  }
  for (CLI::Option* opt : {train_seed, eval_seed, ablate_seed}) {
    if (opt->count() > 0) o.seed = seed;
  }

  if (*train) return fm3q::cli::RunTrain(o, std::cout, std::cerr);
  if (*oracle) return fm3q::cli::RunOracle(o, std::cout, std::cerr);
  if (*eval) return fm3q::cli::RunEval(o, std::cout, std::cerr);
  return fm3q::cli::RunAblate(o, std::cout, std::cerr);
}
