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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fm3q/baselines.h"
#include "fm3q/coordinator.h"
#include "fm3q/eval.h"
#include "fm3q/factorized_q.h"
#include "fm3q/finite_diff.h"
#include "fm3q/igmm.h"
#include "fm3q/learner.h"
#include "fm3q/oracle.h"
#include "fm3q/policy.h"
#include "fm3q/tabular_fm3q.h"
#include "fm3q/tabular_game.h"

namespace fm3q {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int failures = 0;

void Report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

TabularGame SmallRandom(uint64_t seed, int64_t states, int actions, double gamma,
                        bool deterministic) {
  RandomGameOptions o;
  o.seed = seed;
  o.num_states = states;
  o.num_pro = 2;
  o.num_ant = 2;
  o.actions_per_agent = actions;
  o.gamma = gamma;
  o.deterministic = deterministic;
  return RandomTabularGame(o);
}

const double kGammas[] = {0.5, 0.9, 0.99};

void Contraction() {
  const auto t0 = Clock::now();
  int trials = 0, held = 0;
  double worst = -1e300;
  for (int k = 0; k < 12; ++k) {
    const double gamma = kGammas[k % 3];
    const TabularGame g = SmallRandom(100 + k, 2 + k % 4, 2 + k % 2, gamma, k % 2 == 0);
    Rng rng = DeriveStream(k, streams::kSampling);
    const Dataset data = FullCoverageDataset(g, 2, rng);
    for (int pair = 0; pair < 10; ++pair) {
      const TabularFQ x = RandomTabularFQ(g, rng, 5.0);
      const TabularFQ y = RandomTabularFQ(g, rng, 5.0);
      const double before = SupDistance(x, y);
      const double after =
          SupDistance(ExactOperatorApply(x, data, gamma), ExactOperatorApply(y, data, gamma));
      ++trials;
      held += after <= gamma * before + 1e-9;
      worst = std::max(worst, after - gamma * before);
    }
  }
  const double secs = Seconds(t0);
  Report(1, held == trials && secs < 60.0,
         Fmt("%d/%d pairs on 12 games satisfy |TQ-TQ'| <= gamma|Q-Q'| + 1e-9 "
             "(max excess %.2e); %.1f s",
             held, trials, worst, secs));
}

// In exact arithmetic consecutive sup-norm changes shrink by at least gamma.
// The stored tables are rounded, so each measured change carries an error
// of about one ulp of max|Q|; ratios are compared with that slack once the
// changes themselves are down to a few ulps.
void Convergence() {
  const auto t0 = Clock::now();
  int ok = 0, strict = 0, raw_violations = 0;
  double worst_dist = 0.0, worst_ulps = -1e300;
  for (int k = 0; k < 10; ++k) {
    const double gamma = kGammas[k % 3];
    const TabularGame g = SmallRandom(200 + k, 2 + k % 4, 2 + k % 2, gamma, true);
    Rng rng = DeriveStream(k, streams::kSampling);
    const Dataset data = FullCoverageDataset(g, 1, rng);
    const OperatorRun run = IterateExactOperator(g, data, 1e-9, 100000);
    const OracleSolution sol = SolveSuperbQ(g, 1e-12, 100000);
    double dist = 0.0, qmax = 0.0;
    for (size_t i = 0; i < sol.q_star.size(); ++i) {
      dist = std::max(dist, std::abs(run.q.q_tot[i] - sol.q_star[i]));
      qmax = std::max(qmax, std::abs(run.q.q_tot[i]));
    }
    const double ulp = std::numeric_limits<double>::epsilon() * qmax;
    bool ratios = true, strict_ratios = true;
    for (size_t i = 1; i < run.residuals.size(); ++i) {
      const double excess = run.residuals[i] - (gamma + 1e-9) * run.residuals[i - 1];
      worst_ulps = std::max(worst_ulps, excess / ulp);
      if (excess > 0.0) {
        strict_ratios = false;
        ++raw_violations;
      }
      ratios = ratios && excess <= 4.0 * ulp;
    }
    worst_dist = std::max(worst_dist, dist);
    ok += dist <= 1e-6 && ratios;
    strict += dist <= 1e-6 && strict_ratios;
  }
  const double secs = Seconds(t0);
  Report(2, ok == 10 && secs < 60.0,
         Fmt("%d/10 games within 1e-6 of the oracle (max %.2e) with residual ratio <= gamma + "
             "1e-9 up to 4 ulps of max|Q| (worst %.2f ulps); without the rounding slack %d/10 "
             "(%d tail iterations over); %.1f s",
             ok, worst_dist, worst_ulps, strict, raw_violations, secs));
}

void Igmm() {
  const auto t0 = Clock::now();
  int cases = 0, consistent = 0;
  for (int model = 0; model < 50; ++model) {
    // 3^2 x 3^2 = 81 joint actions.
    const TabularGame g = SmallRandom(300 + model, 50, 3, 0.9, true);
    const FactorizedQ fq(g, FactorizedQSpec{});
    Rng rng = DeriveStream(model, streams::kInit);
    const std::vector<double> p = fq.InitialParams(rng);
    for (StateId s = 0; s < 50; ++s) {
      const IgmmVerdict v = IgmmCheck(fq, p, MakeAugmented(g, s), 1e-9);
      ++cases;
      consistent += v.consistent && std::abs(v.min_max.value - v.max_min.value) <= 1e-9;
    }
  }
  const double secs = Seconds(t0);
  Report(3, consistent == cases && secs < 60.0,
         Fmt("%d/%d (model, state) cases consistent with 81 joint actions; %.1f s", consistent,
             cases, secs));
}

void GradientCheck() {
  int ok = 0;
  double worst = 0.0;
  int64_t compared = 0, kinks = 0;
  for (int k = 0; k < 20; ++k) {
    const TabularGame g = SmallRandom(400 + k, 3, 2 + k % 2, 0.9, true);
    FactorizedQSpec spec;
    spec.hidden = k % 2 ? std::vector<int>{6} : std::vector<int>{5, 4};
    spec.mixer.hidden = 3 + k % 3;
    const FactorizedQ fq(g, spec);
    Rng rng = DeriveStream(k, streams::kInit);
    const std::vector<double> p = fq.InitialParams(rng);
    const AugmentedState s = MakeAugmented(g, k % 3);
    JointAction a;
    for (int i = 0; i < 2; ++i) a.pro.push_back(UniformInt(rng, 2 + k % 2));
    for (int j = 0; j < 2; ++j) a.ant.push_back(UniformInt(rng, 2 + k % 2));
    QTotTape tape;
    fq.Forward(p, s, a, &tape);
    std::vector<double> grad(fq.num_params(), 0.0);
    fq.Backward(tape, 1.0, grad);
    const ProbeFn fn = [&](std::span<const double> x) {
      Probe probe;
      QTotTape t;
      probe.value = fq.Forward(x, s, a, &t);
      fq.KinkPattern(t, probe.pattern);
      return probe;
    };
    const FiniteDiffReport r = FiniteDiffCheck(fn, p, grad, 1e-6);
    compared += r.compared;
    kinks += r.kinks;
    worst = std::max(worst, r.max_relative_error);
    ok += r.compared > 0 && r.max_relative_error <= 1e-4;
  }
  Report(4, ok == 20,
         Fmt("%d/20 configurations; max relative error %.2e over %lld coordinates "
             "(%lld skipped at kinks)",
             ok, worst, static_cast<long long>(compared), static_cast<long long>(kinks)));
}

// Shared by the learning criteria.
struct LearningSetup {
  GamePtr game;
  double threshold = 0.0;
  std::vector<uint64_t> seeds;
  TrainConfig fm3q;
  IqlConfig iql;
};

LearningSetup MakeSetup() {
  LearningSetup s;
  s.game = std::make_shared<TabularGame>(SaddleBenchmarkGame());
  s.threshold = 0.05 * s.game->reward_bound() / (1.0 - s.game->gamma());
  for (uint64_t seed = 1000; seed < 1008; ++seed) s.seeds.push_back(seed);
  const int64_t episodes = 300;
  s.fm3q.episodes = episodes;
  s.fm3q.model.hidden = {16};
  s.fm3q.model.mixer.hidden = 8;
  s.fm3q.optimizer.lr = 0.005;
  s.fm3q.buffer_mode = BufferMode::kFull;
  s.fm3q.updates_per_round = 10;
  // About 14 checkpoints per run.
  s.fm3q.checkpoint_every = (episodes + 13) / 14;
  s.iql.episodes = episodes;
  s.iql.hidden = s.fm3q.model.hidden;
  s.iql.optimizer = s.fm3q.optimizer;
  s.iql.updates_per_round = s.fm3q.updates_per_round;
  return s;
}

double GreedyNashConv(const Game& game, const TrainResult& r) {
  const PolicyPair p = ExtractPolicies(r.model, r.params);
  return NashConv(game, ToTeamTable(game, *p.pro), ToTeamTable(game, *p.ant)).nashconv;
}

struct Bookkeeping {
  int64_t rounds = 0;
  bool rounds_consistent = true;
  int64_t matches = 0;
  int64_t zero_sum_violations = 0;
  bool deterministic = true;

  void Rounds(const std::vector<RoundRecord>& log, int updates) {
    rounds += static_cast<int64_t>(log.size());
    rounds_consistent = rounds_consistent && Coordinator::LogConsistent(log, updates);
  }
  void Table(const PayoffTable& t) {
    for (int64_t m : t.matches) matches += m;
    zero_sum_violations += t.zero_sum_violations;
  }
};

void Learning(const LearningSetup& setup, Bookkeeping& book) {
  const Game& game = *setup.game;
  const OracleSolution sol = SolveSuperbQ(game, 1e-10);
  const bool saddle = sol.SaddleEverywhere();

  const auto t0 = Clock::now();
  std::vector<double> fm3q_nc, iql_nc;
  std::vector<TrainResult> runs;
  for (uint64_t seed : setup.seeds) {
    TrainConfig c = setup.fm3q;
    c.seed = seed;
    runs.push_back(Train(setup.game, c));
    book.Rounds(runs.back().rounds, c.updates_per_round);
    fm3q_nc.push_back(GreedyNashConv(game, runs.back()));
    IqlConfig q = setup.iql;
    q.seed = seed;
    const TrainResult iql = TrainIndependent(setup.game, q);
    book.Rounds(iql.rounds, q.updates_per_round);
    iql_nc.push_back(GreedyNashConv(game, iql));
  }
  const double secs = Seconds(t0);
  const int reached = static_cast<int>(std::count_if(
      fm3q_nc.begin(), fm3q_nc.end(), [&](double x) { return x <= setup.threshold; }));
  const double med_f = Median(fm3q_nc), med_q = Median(iql_nc);
  std::string per_seed = " | fm3q:";
  for (double x : fm3q_nc) per_seed += Fmt(" %.4f", x);
  per_seed += " iql:";
  for (double x : iql_nc) per_seed += Fmt(" %.4f", x);
  Report(5, saddle && reached >= 6 && med_q > med_f && secs < 600.0,
         Fmt("saddle verified: %s; fm3q NashConv <= %.4f on %d/8 seeds (need 6); median "
             "NashConv fm3q %.4f vs iql %.4f (need iql strictly higher); %lld episodes; %.0f s",
             saddle ? "yes" : "no", setup.threshold, reached, med_f, med_q,
             static_cast<long long>(setup.fm3q.episodes), secs) +
             per_seed);

  int trending = 0;
  std::string fractions;
  for (size_t k = 0; k < runs.size(); ++k) {
    const std::vector<CohortEntry> cohort = CohortFromCheckpoints(runs[k].checkpoints, setup.game);
    const PayoffTable t = RoundRobin(game, cohort, 1, setup.seeds[k]);
    book.Table(t);
    const TrendResult trend = OptimizationTrend(t);
    trending += trend.fraction_not_worse >= 0.9;
    fractions += Fmt(" %.3f", trend.fraction_not_worse);
  }
  Report(6, trending >= 6,
         Fmt("fraction of later-vs-earlier cells not worse >= 0.9 on %d/8 seeds "
             "(need 6; published reference %.3f):%s",
             trending, 1.0 - 5.0 / 196.0, fractions.c_str()));

  // Determinism: rerun the first seed of each learner.
  TrainConfig c = setup.fm3q;
  c.seed = setup.seeds[0];
  book.deterministic = book.deterministic &&
                       MetricsCsv(Train(setup.game, c).metrics) == MetricsCsv(runs[0].metrics);
  IqlConfig q = setup.iql;
  q.seed = setup.seeds[0];
  book.deterministic = book.deterministic && MetricsCsv(TrainIndependent(setup.game, q).metrics) ==
                                                 MetricsCsv(TrainIndependent(setup.game, q).metrics);
}

void Ablation(const LearningSetup& setup, Bookkeeping& book) {
  const auto t0 = Clock::now();
  AblationConfig a;
  a.train = setup.fm3q;
  a.train.checkpoint_every = 0;
  a.seeds = setup.seeds;
  const size_t total = static_cast<size_t>(a.train.episodes * setup.game->horizon());
  a.sizes = {total * 5 / 100, total * 25 / 100, 0};
  const AblationResult r = AblateBuffer(setup.game, a);
  for (const auto& per_size : r.runs) {
    for (const AblationRun& run : per_size) book.Rounds(run.result.rounds, a.train.updates_per_round);
  }
  for (const PayoffTable& t : r.final_tables) book.Table(t);
  int ordered = 0;
  std::string cells;
  for (size_t s = 0; s < a.seeds.size(); ++s) {
    const double small = r.final_rr[0][s], large = r.final_rr[1][s], full = r.final_rr[2][s];
    ordered += full >= large && large >= small;
    cells += Fmt(" (%.2f %.2f %.2f)", small, large, full);
  }
  Report(7, ordered >= 6,
         Fmt("full >= large >= small normalized RR on %d/8 seeds (need 6); sizes %zu/%zu/full "
             "of %zu steps; %.0f s; (small large full):%s",
             ordered, a.sizes[0], a.sizes[1], total, Seconds(t0), cells.c_str()));
}

}  // namespace
}  // namespace fm3q

int main() {
  using namespace fm3q;
  const auto t0 = Clock::now();
  Contraction();
  Convergence();
  Igmm();
  GradientCheck();
  const LearningSetup setup = MakeSetup();
  Bookkeeping book;
  Learning(setup, book);
  Ablation(setup, book);
  Report(8, book.rounds_consistent && book.rounds > 0,
         Fmt("%lld training rounds: U optimizer steps per target refresh and B = max(1, L/U) "
             "in every round: %s",
             static_cast<long long>(book.rounds), book.rounds_consistent ? "yes" : "no"));
  Report(9, book.zero_sum_violations == 0 && book.deterministic && book.matches > 0,
         Fmt("%lld match episodes, %lld zero-sum violations; identical config and seed "
             "reproduce metrics CSV byte for byte: %s",
             static_cast<long long>(book.matches),
             static_cast<long long>(book.zero_sum_violations),
             book.deterministic ? "yes" : "no"));
  std::printf("%d criteria failed; total %.0f s\n", failures, Seconds(t0));
  return failures == 0 ? 0 : 1;
}
