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

#ifndef FM3Q_TOOLS_RUN_CONFIG_H_
#define FM3Q_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fm3q/baselines.h"
#include "fm3q/eval.h"
#include "fm3q/game.h"
#include "fm3q/learner.h"
#include "json.hpp"

namespace fm3q::cli {

// One training run. Unknown keys are rejected so that typos surface as
// schema errors rather than silently falling back to defaults.
struct RunConfig {
  nlohmann::json game;
  std::string method = "fm3q";  // fm3q | iql | jminimax
  int64_t episodes = 1000;
  // Discount. When the game document has no gamma of its own this value is
  // injected into it; games with a fixed discount reject a conflicting one.
  std::optional<double> gamma;
  double lr = 5e-4;
  std::vector<int> hidden = {64, 64};
  int mix_hidden = 32;
  std::string backend = "neural";  // neural | tabular
  int window = 1;
  BufferMode buffer_mode = BufferMode::kFull;
  size_t buffer_capacity = 0;
  int updates_per_round = 10;
  EpsilonSchedule epsilon;
  uint64_t seed = 0;
  int64_t checkpoint_every = 0;
  int64_t eval_every = 0;
  double alpha = 0.5;  // jminimax step size
  std::string out;

  static constexpr double kDefaultGamma = 0.99;

  // Throws ConfigError naming the dotted field path.
  static RunConfig FromJson(const nlohmann::json& doc, const std::string& path = "config");
  // Every field, with the resolved gamma.
  nlohmann::json ToJson() const;

  // The game document after gamma injection.
  nlohmann::json ResolvedGame() const;
  GamePtr BuildGame() const;

  TrainConfig ToTrain() const;
  IqlConfig ToIql() const;
  JointMinimaxConfig ToJointMinimax() const;
};

// Buffer ablation: the run fields plus
//   sizes             increasing list of capacities; an integer, "full", or
//                     "<p>%" meaning p percent of episodes * horizon
//   seeds             training seeds (default [seed])
//   episodes_per_pair matches per ordered pair (default 1)
struct AblateConfig {
  RunConfig run;
  nlohmann::json sizes;
  std::vector<uint64_t> seeds;
  int64_t episodes_per_pair = 1;

  static AblateConfig FromJson(const nlohmann::json& doc, const std::string& path = "config");
  nlohmann::json ToJson() const;
  // Resolves percentage sizes against the game's horizon.
  AblationConfig Resolve(const Game& game) const;
};

}  // namespace fm3q::cli

#endif  // FM3Q_TOOLS_RUN_CONFIG_H_
