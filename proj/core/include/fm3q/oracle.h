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

#ifndef FM3Q_ORACLE_H_
#define FM3Q_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fm3q/game.h"
#include "json.hpp"

namespace fm3q {

// Deterministic stationary team policy on an enumerable game: the team joint
// action index played in each state.
using TeamTable = std::vector<int64_t>;

// Ground truth for an enumerable game.
struct OracleSolution {
  int64_t num_states = 0;
  int64_t pro_joint = 0;
  int64_t ant_joint = 0;
  double gamma = 0.0;
  // Q*_tot[s][a][b], the fixed point of the minimax Bellman operator.
  std::vector<double> q_star;
  // V*(s) = min_b max_a Q*_tot(s, a, b).
  std::vector<double> v_star;
  // max_a min_b Q*_tot(s, a, b); equals v_star wherever the stage game has
  // a pure saddle point.
  std::vector<double> v_maxmin;
  // argmax_a min_b and argmin_b max_a selections per state.
  TeamTable pro_policy;
  TeamTable ant_policy;
  int iterations = 0;
  double residual = 0.0;
  // Sup-norm change of every iteration, in order.
  std::vector<double> residuals;

  std::span<const double> Stage(StateId s) const {
    return {q_star.data() + s * pro_joint * ant_joint,
            static_cast<size_t>(pro_joint * ant_joint)};
  }
  // Every state's stage game has min-max == max-min within tol.
  bool SaddleEverywhere(double tol = 1e-9) const;

  nlohmann::json ToJson() const;
};

// ceil(log(tol * (1 - gamma) / R_max) / log(gamma)) + 10.
int DefaultMaxIterations(double gamma, double tol, double reward_bound);

// Value iteration Q <- R + gamma * E[min_b' max_a' Q(s', a', b')] from Q = 0
// until the sup-norm change drops below tol. Throws ConvergenceError (with
// the last residual) if max_iters is reached; max_iters <= 0 selects
// DefaultMaxIterations.
OracleSolution SolveSuperbQ(const Game& game, double tol = 1e-8, int max_iters = 0);

// Best response of one team to a fixed deterministic opponent policy.
struct BestResponse {
  Team team = Team::kPro;
  TeamTable opponent;
  // Optimal value of the induced single-team MDP (Pro maximizes, Ant
  // minimizes), accurate to tol.
  std::vector<double> values;
  TeamTable policy;
  int iterations = 0;
  double residual = 0.0;
};

BestResponse SolveBestResponse(const Game& game, const TeamTable& opponent,
                               Team responder, double tol = 1e-8, int max_iters = 0);

// Exact discounted value of a policy pair, accurate to tol.
std::vector<double> EvaluatePolicies(const Game& game, const TeamTable& pro,
                                     const TeamTable& ant, double tol = 1e-8);

struct NashConvResult {
  double nashconv = 0.0;
  // Expected values under the initial-state distribution.
  double value = 0.0;
  double pro_best_response = 0.0;
  double ant_best_response = 0.0;
  double pro_gain() const { return pro_best_response - value; }
  double ant_gain() const { return value - ant_best_response; }
};

// [BR_pro(ant) - V(pro, ant)] + [V(pro, ant) - BR_ant(pro)], averaged over
// the initial-state distribution.
NashConvResult NashConv(const Game& game, const TeamTable& pro, const TeamTable& ant,
                        double tol = 1e-8);

// Expectation of a state-value vector under the game's initial distribution.
double InitialValue(const Game& game, std::span<const double> values);

}  // namespace fm3q

#endif  // FM3Q_ORACLE_H_
