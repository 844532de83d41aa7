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

#include <cmath>
#include <filesystem>
#include <memory>
#include <vector>

#include "fm3q/errors.h"
#include "fm3q/eval.h"
#include "fm3q/oracle.h"
#include "fm3q/policy.h"
#include "fm3q/tabular_game.h"
#include "gtest/gtest.h"

namespace fm3q {
namespace {

GamePtr Saddle() { return std::make_shared<TabularGame>(SaddleBenchmarkGame()); }

CohortEntry TableEntry(const Game& g, const std::string& name, TeamTable pro, TeamTable ant,
                       int64_t episode = 0) {
  return {name, episode,
          {std::make_shared<TablePolicy>(g, Team::kPro, std::move(pro)),
           std::make_shared<TablePolicy>(g, Team::kAnt, std::move(ant))}};
}

// Hand-built n x n table with the given strictly-lower-triangle cells.
PayoffTable TableFromLower(size_t n, const std::vector<double>& lower) {
  PayoffTable t;
  t.cells.assign(n * n, 0.0);
  size_t k = 0;
  for (size_t i = 1; i < n; ++i) {
    for (size_t j = 0; j < i; ++j) {
      t.cells[i * n + j] = lower[k];
      t.cells[j * n + i] = -lower[k];
      ++k;
    }
  }
  for (size_t i = 0; i < n; ++i) t.names.push_back("e" + std::to_string(i));
  return t;
}

TEST(PlayMatchTest, MatrixGameIsExactAndZeroSum) {
  const TabularGame g = MatrixTeamGame({3, 1, 2, 0}, {2}, {2});
  const TablePolicy pro(g, Team::kPro, {1});
  const TablePolicy ant(g, Team::kAnt, {0});
  Rng rng = DeriveStream(1, streams::kEval);
  const MatchResult r = PlayMatch(g, pro, ant, 5, rng);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.mean_return, 2.0);
  EXPECT_EQ(r.ant_mean_return, -2.0);
  EXPECT_EQ(r.win_rate, 1.0);
  EXPECT_EQ(r.zero_sum_violations, 0);
  EXPECT_THROW(PlayMatch(g, ant, pro, 1, rng), InvalidArgument);
}

TEST(PlayMatchTest, TruncatedReturnIsCloseToTheDiscountedValue) {
  const GamePtr g = Saddle();
  const OracleSolution sol = SolveSuperbQ(*g, 1e-12);
  const TablePolicy pro(*g, Team::kPro, sol.pro_policy);
  const TablePolicy ant(*g, Team::kAnt, sol.ant_policy);
  Rng rng = DeriveStream(2, streams::kEval);
  const MatchResult r = PlayMatch(*g, pro, ant, 1, rng);
  // The tail beyond the horizon is at most gamma^H * Rmax / (1 - gamma).
  const double tail = std::pow(g->gamma(), g->horizon()) * g->reward_bound() / (1.0 - g->gamma());
  EXPECT_NEAR(r.mean_return, InitialValue(*g, sol.v_star), tail + 1e-9);
  EXPECT_EQ(r.zero_sum_violations, 0);
}

TEST(PlayMatchTest, StochasticGamesAreSampled) {
  RandomGameOptions o;
  o.seed = 4;
  o.num_states = 3;
  o.gamma = 0.5;
  o.deterministic = false;
  const TabularGame g = RandomTabularGame(o);
  const TablePolicy pro(g, Team::kPro, {0, 0, 0});
  const TablePolicy ant(g, Team::kAnt, {1, 1, 1});
  Rng rng = DeriveStream(3, streams::kEval);
  const MatchResult r = PlayMatch(g, pro, ant, 200, rng);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.episodes, 200);
  EXPECT_GT(r.half_width, 0.0);
  const double v = InitialValue(g, EvaluatePolicies(g, {0, 0, 0}, {1, 1, 1}, 1e-12));
  EXPECT_NEAR(r.mean_return, v, 3 * r.half_width + 0.01);
  EXPECT_THROW(PlayMatch(g, pro, ant, 0, rng), InvalidArgument);
}

TEST(RoundRobinTest, AntisymmetricWithZeroDiagonal) {
  const GamePtr g = Saddle();
  Rng rng = DeriveStream(5, 0);
  std::vector<CohortEntry> entries;
  for (int k = 0; k < 4; ++k) {
    entries.push_back(TableEntry(*g, "r" + std::to_string(k),
                                 RandomTeamTable(*g, Team::kPro, rng),
                                 RandomTeamTable(*g, Team::kAnt, rng), k));
  }
  const PayoffTable t = RoundRobin(*g, entries, 1, 7);
  ASSERT_EQ(t.size(), 4u);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.cell(i, i), 0.0);
    for (size_t j = 0; j < 4; ++j) EXPECT_EQ(t.cell(i, j), -t.cell(j, i));
  }
  EXPECT_EQ(t.zero_sum_violations, 0);
  double lo = 1.0, hi = 0.0;
  for (double x : t.rr_normalized) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
  // Same seed, same table; order of evaluation does not matter.
  EXPECT_EQ(RoundRobin(*g, entries, 1, 7).cells, t.cells);
}

TEST(RoundRobinTest, IdenticalEntriesNormalizeToOneHalf) {
  const GamePtr g = Saddle();
  const CohortEntry e = TableEntry(*g, "same", {0, 1, 2, 3}, {3, 2, 1, 0});
  const PayoffTable t = RoundRobin(*g, {e, e, e}, 1, 1);
  for (double x : t.cells) EXPECT_EQ(x, 0.0);
  for (double x : t.rr_normalized) EXPECT_EQ(x, 0.5);
  EXPECT_THROW(RoundRobin(*g, {e}, 1, 1), InvalidArgument);
}

TEST(RoundRobinTest, OracleBeatsOrTiesEveryone) {
  const GamePtr g = Saddle();
  const OracleSolution sol = SolveSuperbQ(*g, 1e-12);
  Rng rng = DeriveStream(6, 0);
  std::vector<CohortEntry> entries = {
      TableEntry(*g, "oracle", sol.pro_policy, sol.ant_policy)};
  for (int k = 0; k < 5; ++k) {
    entries.push_back(TableEntry(*g, "r", RandomTeamTable(*g, Team::kPro, rng),
                                 RandomTeamTable(*g, Team::kAnt, rng)));
  }
  const PayoffTable t = RoundRobin(*g, entries, 1, 2);
  // Up to the horizon truncation the oracle pair is a saddle point, so it
  // never loses a cell.
  const double tail = std::pow(g->gamma(), g->horizon()) * g->reward_bound() / (1.0 - g->gamma());
  for (size_t j = 1; j < t.size(); ++j) EXPECT_GE(t.cell(0, j), -tail);
  EXPECT_EQ(t.rr_normalized[0], 1.0);
}

TEST(TrendTest, MonotoneCohortScoresOne) {
  const TrendResult r = OptimizationTrend(TableFromLower(4, {1, 2, 1, 3, 2, 1}));
  EXPECT_EQ(r.cells, 6);
  EXPECT_EQ(r.later_wins, 6);
  EXPECT_EQ(r.fraction_positive, 1.0);
  EXPECT_EQ(r.fraction_not_worse, 1.0);
}

TEST(TrendTest, TiesAreNotViolations) {
  const TrendResult r = OptimizationTrend(TableFromLower(3, {0.0, -0.5, 1e-12}));
  EXPECT_EQ(r.ties, 2);
  EXPECT_EQ(r.violations, 1);
  EXPECT_EQ(r.later_wins, 0);
  EXPECT_DOUBLE_EQ(r.fraction_not_worse, 2.0 / 3.0);
  EXPECT_EQ(r.fraction_positive, 0.0);
}

TEST(TrendTest, ReferenceViolationRateClearsTheBar) {
  // 5 violations in a 14 x 14 cross-play table.
  const double reference = 1.0 - 5.0 / 196.0;
  EXPECT_NEAR(reference, 0.974, 5e-4);
  EXPECT_GE(reference, 0.9);
  // The same five violations counted over the 91 later-vs-earlier cells.
  std::vector<double> lower(91, 1.0);
  for (int k = 0; k < 5; ++k) lower[k * 17] = -1.0;
  const TrendResult r = OptimizationTrend(TableFromLower(14, lower));
  EXPECT_EQ(r.violations, 5);
  EXPECT_DOUBLE_EQ(r.fraction_not_worse, 1.0 - 5.0 / 91.0);
  EXPECT_GE(r.fraction_not_worse, 0.9);
}

TEST(CurveTest, NashConvOfOracleAndRandomPolicies) {
  const GamePtr g = Saddle();
  const OracleSolution sol = SolveSuperbQ(*g, 1e-12);
  const std::vector<CohortEntry> entries = {
      TableEntry(*g, "oracle", sol.pro_policy, sol.ant_policy, 10),
      TableEntry(*g, "fixed", {0, 0, 0, 0}, {0, 0, 0, 0}, 20)};
  const Curve c = NashConvCurve(*g, entries, 1e-10);
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points[0].episode, 10);
  EXPECT_NEAR(c.points[0].value, 0.0, 4e-10);
  EXPECT_NEAR(c.points[1].value,
              NashConv(*g, {0, 0, 0, 0}, {0, 0, 0, 0}, 1e-10).nashconv, 1e-12);
}

TEST(CurveTest, VsBotIsZeroForTheBotItself) {
  const GamePtr g = Saddle();
  const TeamTable pro = ToTeamTable(*g, ScriptedPolicy(g, Team::kPro));
  const TeamTable ant = ToTeamTable(*g, ScriptedPolicy(g, Team::kAnt));
  const Curve c = VsBotCurve(g, {TableEntry(*g, "bot", pro, ant)}, 1, 3);
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_EQ(c.points[0].value, 0.0);
}

TrainConfig TinyTrain() {
  TrainConfig c;
  c.episodes = 4;
  c.model.hidden = {4};
  c.model.mixer.hidden = 4;
  c.optimizer.lr = 0.01;
  return c;
}

TEST(AblationTest, Validation) {
  AblationConfig c;
  c.train = TinyTrain();
  c.seeds = {0};
  c.sizes = {20, 10};
  EXPECT_THROW(c.Validate(), ConfigError);
  c.sizes = {10, 0};
  EXPECT_NO_THROW(c.Validate());
  c.sizes = {0, 10};
  EXPECT_THROW(c.Validate(), ConfigError);
  c.sizes = {10};
  c.seeds.clear();
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(AblationTest, EqualSizesGiveIdenticalCohorts) {
  const GamePtr g = Saddle();
  AblationConfig c;
  c.train = TinyTrain();
  c.train.checkpoint_every = 2;
  c.sizes = {15, 15};
  c.seeds = {0, 1};
  const AblationResult r = AblateBuffer(g, c);
  ASSERT_EQ(r.runs.size(), 2u);
  ASSERT_EQ(r.final_rr.size(), 2u);
  for (size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(r.runs[0][s].result.params, r.runs[1][s].result.params);
    EXPECT_EQ(r.final_rr[0][s], 0.5);
    EXPECT_EQ(r.final_rr[1][s], 0.5);
    EXPECT_EQ(r.runs[0][s].result.final_buffer_size, 15u);
  }
  EXPECT_EQ(r.final_tables.size(), 2u);
  EXPECT_EQ(r.zero_sum_violations, 0);
}

TEST(EvalReportTest, WritesFiles) {
  EvalReport report;
  report.config = {{"k", 1}};
  report.curves["nashconv"] = Curve{"nashconv", {{1, 0.5, 0}, {2, 0.25, 0}}};
  report.tables["rr"] = TableFromLower(2, {1.0});
  report.scalars["x"] = 3.0;
  const auto dir = std::filesystem::temp_directory_path() / "fm3q_report_test";
  std::filesystem::remove_all(dir);
  report.Write(dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "curve_nashconv.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "payoff_rr.csv"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fm3q
