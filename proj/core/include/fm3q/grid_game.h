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

#ifndef FM3Q_GRID_GAME_H_
#define FM3Q_GRID_GAME_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fm3q/game.h"

namespace fm3q {

// 2v2 "seize the target" grid. Agents 0,1 are Pro, 2,3 are Ant (global
// indices). Actions: 0 up (y+1), 1 down (y-1), 2 left (x-1), 3 right (x+1),
// 4 stay. Moves off the board leave the agent in place.
struct GridConfig {
  int side = 5;
  int horizon = 20;
  double gamma = 0.9;
  std::array<int, 2> target = {2, 2};
  // (x, y) per global agent index.
  std::array<std::array<int, 2>, 4> start = {{{0, 0}, {0, 4}, {4, 0}, {4, 4}}};
  // Chebyshev radius beyond which other agents are hidden; < 0 means fully
  // observable.
  int observation_radius = -1;

  // Default start corners and centered target for a given side.
  static GridConfig ForSide(int side);
};

class GridKeepawayGame : public Game {
 public:
  static constexpr int kNumAgents = 4;
  static constexpr int kNumActions = 5;
  enum Move { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };

  explicit GridKeepawayGame(GridConfig config);

  std::string type() const override { return "grid"; }
  const GridConfig& config() const { return config_; }
  int64_t num_states() const override { return num_states_; }
  bool enumerable() const override { return num_states_ <= 100000; }
  bool deterministic() const override { return true; }

  Distribution TransitionJoint(StateId s, int64_t a, int64_t b) const override;
  double RewardJoint(StateId s, int64_t a, int64_t b) const override;
  Distribution InitialDistribution() const override;

  Observation Observe(StateId s, Team team, int agent) const override;
  int observation_size() const override { return 13; }
  std::vector<double> StateFeatures(StateId s) const override;
  int state_feature_size() const override { return 10; }

  // Move toward the target along the axis with the larger gap; ties move
  // horizontally first; stay when already on the target.
  std::vector<int> ScriptedTeamAction(StateId s, Team team) const override;

  nlohmann::json ToJson() const override;

  using Positions = std::array<std::array<int, 2>, kNumAgents>;
  Positions Decode(StateId s) const;
  StateId Encode(const Positions& p) const;

  // Simultaneous move resolution. The contested cell goes to the lowest
  // global index, an agent that ends up staying always keeps its own cell,
  // and two agents swapping cells both bounce back. Repeats until no two
  // agents share a cell.
  Positions Resolve(const Positions& current, const std::array<int, kNumAgents>& moves) const;

  // +1 per Pro agent and -1 per Ant agent on the target, clipped to [-1, 1].
  double TargetReward(const Positions& p) const;

 private:
  GridConfig config_;
  int64_t num_states_;
};

}  // namespace fm3q

#endif  // FM3Q_GRID_GAME_H_
