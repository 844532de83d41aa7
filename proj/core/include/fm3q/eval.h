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

#ifndef FM3Q_EVAL_H_
#define FM3Q_EVAL_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fm3q/checkpoint.h"
#include "fm3q/game.h"
#include "fm3q/learner.h"
#include "fm3q/policy.h"
#include "json.hpp"

namespace fm3q {

struct MatchResult {
  // Discounted returns from Pro's and Ant's point of view.
  double mean_return = 0.0;
  double ant_mean_return = 0.0;
  // A win is a positive Pro return, a draw a zero return.
  double win_rate = 0.0;
  double draw_rate = 0.0;
  double loss_rate = 0.0;
  // Episodes played; on deterministic games one per initial state.
  int64_t episodes = 0;
  // 95% normal-approximation half-width; 0 when exact.
  double half_width = 0.0;
  bool exact = false;
  // Episodes whose Pro and Ant returns did not sum to exactly 0.
  int64_t zero_sum_violations = 0;
};

// Plays epsilon = 0 policies against each other. On a deterministic game the
// initial-state support is enumerated once each and the result is the exact
// expectation; otherwise `episodes` episodes are sampled from rng.
MatchResult PlayMatch(const Game& game, const TeamPolicy& pro, const TeamPolicy& ant,
                      int64_t episodes, Rng& rng);

struct CohortEntry {
  std::string name;
  int64_t episode = 0;
  PolicyPair policies;
};

// cell(i, j) = (ret(Pro_i vs Ant_j) - ret(Pro_j vs Ant_i)) / 2, the mean
// return of entry i against entry j when each plays both sides once.
struct PayoffTable {
  std::vector<std::string> names;
  std::vector<int64_t> episodes;
  std::vector<double> cells;  // row-major n x n
  std::vector<int64_t> matches;
  std::vector<double> half_widths;
  // RR return: row sums, and their min-max normalization over the cohort
  // (all 0.5 when every row sum is equal).
  std::vector<double> rr_return;
  std::vector<double> rr_normalized;
  int64_t zero_sum_violations = 0;
  std::vector<std::string> warnings;

  size_t size() const { return names.size(); }
  double cell(size_t i, size_t j) const { return cells[i * names.size() + j]; }

  nlohmann::json ToJson() const;
  std::string CellsCsv() const;
};

// Needs at least two entries (InvalidArgument otherwise). Each ordered pair
// plays on its own stream DeriveStream(seed, 1000 + i * n + j), so results do
// not depend on evaluation order.
PayoffTable RoundRobin(const Game& game, const std::vector<CohortEntry>& entries,
                       int64_t episodes_per_pair, uint64_t seed);

// Loads the policies of every checkpoint; unloadable ones are skipped with a
// warning appended to `warnings`.
std::vector<CohortEntry> CohortFromCheckpoints(const std::vector<Checkpoint>& checkpoints,
                                               GamePtr game,
                                               std::vector<std::string>* warnings = nullptr);

struct CurvePoint {
  int64_t episode = 0;
  double value = 0.0;
  // Matches behind the value; 0 for exact oracle computations.
  int64_t matches = 0;
};

struct Curve {
  std::string name;
  std::vector<CurvePoint> points;

  nlohmann::json ToJson() const;
  std::string Csv() const;
};

// Exact NashConv of every entry's greedy pair (enumerable games).
Curve NashConvCurve(const Game& game, const std::vector<CohortEntry>& entries, double tol);

// (ret(Pro_i vs bot) - ret(bot vs Ant_i)) / 2 per entry.
Curve VsBotCurve(GamePtr game, const std::vector<CohortEntry>& entries, int64_t episodes,
                 uint64_t seed);

// Later-versus-earlier statistics over the strictly lower triangle of a
// table whose entries are ordered by episode.
struct TrendResult {
  int64_t cells = 0;
  int64_t later_wins = 0;  // cell > tie_tol
  int64_t ties = 0;        // |cell| <= tie_tol
  int64_t violations = 0;  // cell < -tie_tol
  // later_wins / cells.
  double fraction_positive = 0.0;
  // 1 - violations / cells.
  double fraction_not_worse = 0.0;
  nlohmann::json ToJson() const;
};

TrendResult OptimizationTrend(const PayoffTable& table, double tie_tol = 1e-9);

struct AblationConfig {
  // Buffer capacities in increasing order; 0 means full (never evicts).
  std::vector<size_t> sizes;
  TrainConfig train;
  std::vector<uint64_t> seeds;
  int64_t episodes_per_pair = 1;

  nlohmann::json ToJson() const;
  // Throws ConfigError if a size is smaller than its predecessor, a bounded
  // size is 0, or no seeds are given.
  void Validate(const std::string& path = "ablate") const;
};

struct AblationRun {
  size_t size = 0;
  uint64_t seed = 0;
  TrainResult result;
  TrendResult trend;
};

struct AblationResult {
  // runs[k][s]: size k, seed s.
  std::vector<std::vector<AblationRun>> runs;
  // final_rr[k][s]: normalized RR return of size k's final model within the
  // seed-s cross-play cohort of final models.
  std::vector<std::vector<double>> final_rr;
  std::vector<PayoffTable> final_tables;  // one per seed
  int64_t zero_sum_violations = 0;
};

AblationResult AblateBuffer(GamePtr game, const AblationConfig& config);

// Named curves, payoff tables, scalars and the echoed configuration.
struct EvalReport {
  nlohmann::json config;
  std::vector<uint64_t> seeds;
  std::map<std::string, Curve> curves;
  std::map<std::string, PayoffTable> tables;
  std::map<std::string, TrendResult> trends;
  std::map<std::string, double> scalars;

  nlohmann::json ToJson() const;
  // report.json plus curve_<name>.csv and payoff_<name>.csv.
  void Write(const std::string& dir) const;
};

}  // namespace fm3q

#endif  // FM3Q_EVAL_H_
