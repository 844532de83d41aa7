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

#ifndef FM3Q_TABULAR_GAME_H_
#define FM3Q_TABULAR_GAME_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fm3q/game.h"

namespace fm3q {

// A game given by explicit tensors:
//   transitions[s][a][b][s'] (row-major, a and b are team joint indices)
//   rewards[s][a][b]
// Fully observable: every agent observes s, tagged with its global agent
// index (Pro agents first).
class TabularGame : public Game {
 public:
  TabularGame(std::vector<int> pro_counts, std::vector<int> ant_counts,
              int64_t num_states, std::vector<double> transitions,
              std::vector<double> rewards, double gamma, int horizon,
              std::vector<double> initial = {}, std::string label = "tabular");

  std::string type() const override { return "tabular"; }
  const std::string& label() const { return label_; }
  int64_t num_states() const override { return num_states_; }
  bool enumerable() const override { return true; }
  bool deterministic() const override { return deterministic_; }

  Distribution TransitionJoint(StateId s, int64_t a, int64_t b) const override;
  double RewardJoint(StateId s, int64_t a, int64_t b) const override;
  Distribution InitialDistribution() const override;

  Observation Observe(StateId s, Team team, int agent) const override;
  int observation_size() const override;
  std::vector<double> StateFeatures(StateId s) const override;
  int state_feature_size() const override { return static_cast<int>(num_states_); }

  nlohmann::json ToJson() const override;

  double probability(StateId s, int64_t a, int64_t b, StateId next) const;
  const std::vector<double>& transitions() const { return transitions_; }
  const std::vector<double>& rewards() const { return rewards_; }

 private:
  size_t Index(StateId s, int64_t a, int64_t b) const;

  int64_t num_states_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
  std::vector<double> initial_;
  std::string label_;
  bool deterministic_ = true;
};

struct RandomGameOptions {
  uint64_t seed = 0;
  int64_t num_states = 1;
  int num_pro = 1;
  int num_ant = 1;
  int actions_per_agent = 2;
  double gamma = 0.9;
  // 0 selects the smallest H with gamma^H <= 1e-3 (1 when gamma == 0).
  int horizon = 0;
  // Collapse each transition row onto its largest draw.
  bool deterministic = false;
};

// Transitions: per-(s,a,b) normalized vectors of uniform(0,1] draws.
// Rewards: uniform in [-1, 1]. Bitwise reproducible for a fixed seed.
TabularGame RandomTabularGame(const RandomGameOptions& options);

// Single-state game with gamma = 0 and horizon 1. payoff is indexed
// [pro joint][ant joint].
TabularGame MatrixTeamGame(const std::vector<double>& payoff,
                           std::vector<int> pro_counts,
                           std::vector<int> ant_counts);

// Smallest H with gamma^H <= 1e-3.
int DefaultHorizon(double gamma);

// The fixed 4-state, 2v2, 2-action game with deterministic transitions used
// by the end-to-end learning checks. Its superb Q has a pure saddle point in
// every state.
TabularGame SaddleBenchmarkGame();

}  // namespace fm3q

#endif  // FM3Q_TABULAR_GAME_H_
