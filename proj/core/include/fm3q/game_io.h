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

#ifndef FM3Q_GAME_IO_H_
#define FM3Q_GAME_IO_H_

#include <string>

#include "fm3q/game.h"
#include "json.hpp"

namespace fm3q {

// Builds a game from a config document. Recognized "type" values:
//   "tabular" explicit tensors {num_states, pro_actions, ant_actions, gamma,
//             horizon, transitions{dims,data}, rewards{dims,data}, initial?}
//   "random"  {seed, num_states, n, m, actions, gamma, horizon?, deterministic?}
//   "matrix"  {payoff{dims,data}, pro_actions, ant_actions}
//   "grid"    {side, horizon?, gamma?, target?, start?, observation_radius?}
//   "saddle"  the fixed end-to-end benchmark game (no options)
// Errors are ConfigError with the dotted path of the offending field, rooted
// at `path`.
GamePtr GameFromJson(const nlohmann::json& doc, const std::string& path = "game");

GamePtr LoadGame(const std::string& file);

}  // namespace fm3q

#endif  // FM3Q_GAME_IO_H_
