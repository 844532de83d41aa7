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

#ifndef FM3Q_TABULAR_FM3Q_H_
#define FM3Q_TABULAR_FM3Q_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fm3q/game.h"
#include "fm3q/oracle.h"

namespace fm3q {

// One (s, a, b, r, s', done) sample with team joint action indices.
struct TabularTransition {
  StateId state = 0;
  int64_t pro = 0;
  int64_t ant = 0;
  double reward = 0.0;
  StateId next = 0;
  bool done = false;
};

struct Dataset {
  int64_t num_states = 0;
  int64_t pro_joint = 0;
  int64_t ant_joint = 0;
  std::vector<TabularTransition> items;

  // 1 for every (s, a, b) cell with at least one sample.
  std::vector<uint8_t> Coverage() const;
  bool FullCoverage() const;
};

// Visits every (s, a, b) `samples_per_cell` times with s' ~ P(.|s,a,b).
// done marks terminal next states.
Dataset FullCoverageDataset(const Game& game, int samples_per_cell, Rng& rng);

// Converts window-1 episode steps of an enumerable game.
Dataset DatasetFromSteps(const Game& game, std::span<const EpisodeStep> steps);

// Function-class-level factorized Q: a joint table q_tot[s][a][b] plus one
// individual table per agent, pro[i][s * |A_i| + a_i] and
// ant[j][s * |B_j| + b_j].
struct TabularFQ {
  int64_t num_states = 0;
  std::vector<int> pro_counts;
  std::vector<int> ant_counts;
  int64_t pro_joint = 0;
  int64_t ant_joint = 0;
  std::vector<double> q_tot;
  std::vector<std::vector<double>> pro;
  std::vector<std::vector<double>> ant;

  std::span<const double> Stage(StateId s) const {
    return {q_tot.data() + s * pro_joint * ant_joint,
            static_cast<size_t>(pro_joint * ant_joint)};
  }
  // Per-agent argmax profile as (pro joint, ant joint); ties to index 0.
  std::pair<int64_t, int64_t> IndividualProfile(StateId s) const;
  // q_tot at the individual profile, i.e. min_b max_a q_tot for members of
  // the IGMM class.
  double Value(StateId s) const;
  TeamTable Policy(Team team) const;
};

// Q == 0 everywhere.
TabularFQ ZeroTabularFQ(const Game& game);

// Random individual tables (uniform in [-scale, scale]) with
// q_tot = sum Q+ - sum Q-, a member of the IGMM class.
TabularFQ RandomTabularFQ(const Game& game, Rng& rng, double scale = 1.0);

// Closed-form minimizer of the empirical Bellman error:
//   q_tot(s,a,b) = mean of e = r + gamma * Q.Value(s') over the dataset
//   samples of (s,a,b) (e = r on done samples); individual tables are
//   indicators of (a*, b*) = argmin_b max_a q_tot(s, ., .).
// Throws CoverageError with the coverage map if a cell has no sample.
TabularFQ ExactOperatorApply(const TabularFQ& q, const Dataset& data, double gamma);

// Mean squared TD error of candidate against targets built from source.
double EmpiricalBellmanError(const TabularFQ& candidate, const TabularFQ& source,
                             const Dataset& data, double gamma);

double SupDistance(const TabularFQ& x, const TabularFQ& y);

struct OperatorRun {
  TabularFQ q;
  int iterations = 0;
  // Sup-norm change of q_tot per application.
  std::vector<double> residuals;
};

// Applies the operator from Q == 0 until the change drops below tol.
// Throws ConvergenceError at max_iters.
OperatorRun IterateExactOperator(const Game& game, const Dataset& data, double tol,
                                 int max_iters);

}  // namespace fm3q

#endif  // FM3Q_TABULAR_FM3Q_H_
