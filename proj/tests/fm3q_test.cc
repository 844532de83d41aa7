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
#include <memory>
#include <vector>

#include "fm3q/errors.h"
#include "fm3q/factorized_q.h"
#include "fm3q/finite_diff.h"
#include "fm3q/igmm.h"
#include "fm3q/mixer.h"
#include "fm3q/tabular_game.h"
#include "gtest/gtest.h"

namespace fm3q {
namespace {

TabularGame SmallGame(uint64_t seed, int actions = 2) {
  RandomGameOptions o;
  o.seed = seed;
  o.num_states = 3;
  o.num_pro = 2;
  o.num_ant = 2;
  o.actions_per_agent = actions;
  o.gamma = 0.9;
  o.deterministic = true;
  return RandomTabularGame(o);
}

FactorizedQSpec SmallSpec() {
  FactorizedQSpec spec;
  spec.hidden = {8};
  spec.mixer.hidden = 6;
  return spec;
}

TEST(FactorizedQSpecTest, DefaultHyperparameters) {
  const FactorizedQSpec spec;
  EXPECT_EQ(spec.hidden, (std::vector<int>{64, 64}));
  EXPECT_EQ(spec.mixer.hidden, 32);
  EXPECT_EQ(spec.mixer.kind, MixerKind::kHypernetwork);
  EXPECT_EQ(spec.mixer.transform, WeightTransform::kAbs);
  EXPECT_EQ(spec.window, 1);
}

TEST(FactorizedQSpecTest, JsonRoundTrip) {
  FactorizedQSpec spec = SmallSpec();
  spec.backend = Backend::kTabular;
  spec.mixer.kind = MixerKind::kAdditive;
  const FactorizedQSpec back = FactorizedQSpec::FromJson(spec.ToJson(), "spec");
  EXPECT_EQ(back.ToJson(), spec.ToJson());
  nlohmann::json bad = spec.ToJson();
  bad["mixer"]["hidden"] = 0;
  try {
    FactorizedQSpec::FromJson(bad, "spec");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "spec.mixer.hidden");
  }
}

TEST(MixerTest, AdditiveIsPlainSum) {
  const TabularGame g = SmallGame(1);
  FactorizedQSpec spec = SmallSpec();
  spec.mixer.kind = MixerKind::kAdditive;
  const FactorizedQ fq(g, spec);
  Rng rng = DeriveStream(1, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  const AugmentedState s = MakeAugmented(g, 2);
  const StateValues v = fq.Evaluate(p, s);
  const JointAction a{{1, 0}, {0, 1}};
  const double expected = v.pro[0][1] + v.pro[1][0] - v.ant[0][0] - v.ant[1][1];
  EXPECT_NEAR(fq.QTot(v, a), expected, 1e-12);
  EXPECT_NEAR(MixForward(fq, p, s, a), expected, 1e-12);
}

TEST(MixerTest, MonotoneInEveryInput) {
  const Mixer mixer({MixerKind::kHypernetwork, 5, WeightTransform::kAbs}, 4, 3);
  ParamLayout layout;
  Mixer m = mixer;
  m.Register(layout);
  std::vector<double> params(layout.size());
  Rng rng = DeriveStream(4, 0);
  for (int trial = 0; trial < 50; ++trial) {
    m.Initialize(params, rng);
    std::vector<double> state(3), q(4);
    for (double& x : state) x = 2.0 * Uniform01(rng) - 1.0;
    for (double& x : q) x = 4.0 * Uniform01(rng) - 2.0;
    MixTape tape;
    m.Forward(params, state, q, &tape);
    std::vector<double> grad(layout.size(), 0.0);
    const std::vector<double> dq = m.Backward(tape, 1.0, grad);
    for (double d : dq) EXPECT_GE(d, 0.0);
  }
}

TEST(FactorizedQTest, AntValuesEnterNegated) {
  const TabularGame g = SmallGame(2);
  const FactorizedQ fq(g, SmallSpec());
  Rng rng = DeriveStream(2, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  const AugmentedState s = MakeAugmented(g, 0);
  const JointAction a{{0, 1}, {1, 0}};
  QTotTape tape;
  fq.Forward(p, s, a, &tape);
  std::vector<double> grad(fq.num_params(), 0.0);
  fq.Backward(tape, 1.0, grad);
  // d Q_tot / d(output bias of agent j's chosen action) = dQ_tot/dq_j.
  auto output_bias_grad = [&](const std::string& prefix, int action) {
    const ParamBlock& b = fq.layout().Find(prefix + "/b1");
    return grad[b.offset + action];
  };
  EXPECT_GE(output_bias_grad("pro0", 0), 0.0);
  EXPECT_GE(output_bias_grad("pro1", 1), 0.0);
  EXPECT_LE(output_bias_grad("ant0", 1), 0.0);
  EXPECT_LE(output_bias_grad("ant1", 0), 0.0);
  // Unchosen actions get no gradient.
  EXPECT_EQ(output_bias_grad("pro0", 1), 0.0);
}

TEST(FactorizedQTest, TabularBackendStartsAtZero) {
  const TabularGame g = SmallGame(3);
  FactorizedQSpec spec = SmallSpec();
  spec.backend = Backend::kTabular;
  const FactorizedQ fq(g, spec);
  Rng rng = DeriveStream(3, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  const ParamBlock& t = fq.layout().Find("pro1/table");
  EXPECT_EQ(t.rows, 3u);
  EXPECT_EQ(t.cols, 2u);
  for (size_t i = 0; i < t.size(); ++i) EXPECT_EQ(p[t.offset + i], 0.0);
  const auto [begin, end] = fq.AgentRange(Team::kPro, 1);
  EXPECT_EQ(begin, t.offset);
  EXPECT_EQ(end, t.offset + t.size());
}

TEST(IgmmTest, MonotoneMixerIsConsistent) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const TabularGame g = SmallGame(seed, 3);
    const FactorizedQ fq(g, SmallSpec());
    Rng rng = DeriveStream(seed, streams::kInit);
    const std::vector<double> p = fq.InitialParams(rng);
    for (StateId s = 0; s < g.num_states(); ++s) {
      const IgmmVerdict v = IgmmCheck(fq, p, MakeAugmented(g, s));
      EXPECT_TRUE(v.consistent) << v.counterexample;
      EXPECT_NEAR(v.min_max.value, v.max_min.value, 1e-9);
    }
  }
}

TEST(IgmmTest, UnconstrainedMixerCanBreakIt) {
  bool found = false;
  for (uint64_t seed = 0; seed < 200 && !found; ++seed) {
    const TabularGame g = SmallGame(seed % 5, 3);
    FactorizedQSpec spec = SmallSpec();
    spec.mixer.transform = WeightTransform::kNone;
    const FactorizedQ fq(g, spec);
    Rng rng = DeriveStream(seed, streams::kInit);
    const std::vector<double> p = fq.InitialParams(rng);
    for (StateId s = 0; s < g.num_states() && !found; ++s) {
      const IgmmVerdict v = IgmmCheck(fq, p, MakeAugmented(g, s));
      if (!v.consistent) {
        found = true;
        EXPECT_FALSE(v.counterexample.empty());
      }
    }
  }
  EXPECT_TRUE(found);
}

TEST(IgmmTest, StageCheckByHand) {
  // Saddle at (a=0, b=1) with value 1.
  const std::vector<double> q = {3, 1, 2, 0};
  EXPECT_TRUE(IgmmCheckStage(q, 2, 2, 0, 1).consistent);
  EXPECT_FALSE(IgmmCheckStage(q, 2, 2, 1, 1).consistent);
  const std::vector<double> pennies = {1, -1, -1, 1};
  EXPECT_FALSE(IgmmCheckStage(pennies, 2, 2, 0, 0).consistent);
}

TEST(GreedyValueTest, MatchesExhaustiveMinMax) {
  const TabularGame g = SmallGame(5, 3);
  const FactorizedQ fq(g, SmallSpec());
  Rng rng = DeriveStream(5, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  for (StateId s = 0; s < g.num_states(); ++s) {
    const AugmentedState a = MakeAugmented(g, s);
    EXPECT_NEAR(GreedyValue(fq, p, a, /*cross_check=*/true),
                ExhaustiveMinMax(fq, p, a).value, 1e-9);
  }
}

TEST(TdTargetTest, DoneAndZeroDiscountDropTheBootstrap) {
  const TabularGame g = SmallGame(6);
  const FactorizedQ fq(g, SmallSpec());
  Rng rng = DeriveStream(6, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  Rng roll = DeriveStream(6, streams::kRollout);
  EpisodeStep step = Step(g, MakeAugmented(g, 0), {{0, 1}, {1, 1}}, roll);
  ASSERT_FALSE(step.done);
  const double v_next = GreedyValue(fq, p, step.next);
  EXPECT_NEAR(TdTarget(fq, p, step), step.reward + 0.9 * v_next, 1e-12);
  step.done = true;
  EXPECT_EQ(TdTarget(fq, p, step), step.reward);

  const TabularGame m = MatrixTeamGame(std::vector<double>(16, 0.25), {2, 2}, {2, 2});
  const FactorizedQ fm(m, SmallSpec());
  const std::vector<double> pm = fm.InitialParams(rng);
  EpisodeStep ms = Step(m, MakeAugmented(m, 0), {{0, 0}, {0, 0}}, roll);
  ms.done = false;
  EXPECT_EQ(TdTarget(fm, pm, ms), 0.25);
}

TEST(SelectActionsTest, ZeroEpsilonDrawsNothing) {
  const TabularGame g = SmallGame(7, 3);
  const FactorizedQ fq(g, SmallSpec());
  Rng init = DeriveStream(7, streams::kInit);
  const std::vector<double> p = fq.InitialParams(init);
  const AugmentedState s = MakeAugmented(g, 1);
  Rng rng = DeriveStream(7, streams::kRollout);
  const Rng before = rng;
  EXPECT_EQ(SelectActions(fq, p, s, 0.0, rng), GreedyActions(fq, p, s));
  EXPECT_TRUE(rng == before);
}

TEST(SelectActionsTest, FullEpsilonCoversEveryAction) {
  const TabularGame g = SmallGame(8, 3);
  const FactorizedQ fq(g, SmallSpec());
  Rng init = DeriveStream(8, streams::kInit);
  const std::vector<double> p = fq.InitialParams(init);
  const AugmentedState s = MakeAugmented(g, 1);
  Rng rng = DeriveStream(8, streams::kRollout);
  std::vector<int> counts(3, 0);
  const int n = 3000;
  for (int k = 0; k < n; ++k) ++counts[SelectActions(fq, p, s, 1.0, rng).ant[1]];
  // Each count is Binomial(3000, 1/3): mean 1000, sd ~26.
  for (int c : counts) EXPECT_NEAR(c, n / 3, 150);
}

TEST(LossTest, GradientMatchesFiniteDifferences) {
  const TabularGame g = SmallGame(9);
  FactorizedQSpec spec = SmallSpec();
  spec.mixer.hidden = 4;
  const FactorizedQ fq(g, spec);
  Rng init = DeriveStream(9, streams::kInit);
  const std::vector<double> p = fq.InitialParams(init);
  Rng roll = DeriveStream(9, streams::kRollout);
  std::vector<EpisodeStep> steps;
  AugmentedState s = MakeAugmented(g, 0);
  for (int k = 0; k < 6; ++k) {
    const JointAction a{{UniformInt(roll, 2), UniformInt(roll, 2)},
                        {UniformInt(roll, 2), UniformInt(roll, 2)}};
    steps.push_back(Step(g, s, a, roll));
    s = steps.back().next;
  }
  std::vector<const EpisodeStep*> batch;
  for (const auto& st : steps) batch.push_back(&st);
  std::vector<double> targets;
  for (const auto& st : steps) targets.push_back(TdTarget(fq, p, st));

  const LossResult analytic = LossFromTargets(fq, p, batch, targets);
  const ProbeFn fn = [&](std::span<const double> x) {
    Probe probe;
    double loss = 0.0;
    for (size_t k = 0; k < batch.size(); ++k) {
      QTotTape tape;
      const double d = targets[k] - fq.Forward(x, batch[k]->state, batch[k]->action, &tape);
      loss += d * d;
      fq.KinkPattern(tape, probe.pattern);
    }
    probe.value = loss / static_cast<double>(batch.size());
    return probe;
  };
  const FiniteDiffReport r = FiniteDiffCheck(fn, p, analytic.grad, 1e-6);
  EXPECT_GT(r.compared, 0);
  EXPECT_LE(r.max_relative_error, 1e-4) << "coordinate " << r.worst_index;
  EXPECT_NEAR(fn(p).value, analytic.loss, 1e-12);
}

TEST(LossTest, NonFiniteTargetThrows) {
  const TabularGame g = SmallGame(10);
  const FactorizedQ fq(g, SmallSpec());
  Rng init = DeriveStream(10, streams::kInit);
  const std::vector<double> p = fq.InitialParams(init);
  Rng roll = DeriveStream(10, streams::kRollout);
  const EpisodeStep st = Step(g, MakeAugmented(g, 0), {{0, 0}, {0, 0}}, roll);
  const EpisodeStep* batch[] = {&st};
  const double targets[] = {std::nan("")};
  EXPECT_THROW(LossFromTargets(fq, p, batch, targets), NonFiniteError);
}

}  // namespace
}  // namespace fm3q
