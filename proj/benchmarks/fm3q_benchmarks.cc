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

#include <memory>
#include <vector>

#include "benchmark/benchmark.h"
#include "fm3q/factorized_q.h"
#include "fm3q/oracle.h"
#include "fm3q/tabular_game.h"

namespace fm3q {
namespace {

TabularGame Game(int actions, double gamma = 0.9) {
  RandomGameOptions o;
  o.seed = 1;
  o.num_states = 8;
  o.num_pro = 2;
  o.num_ant = 2;
  o.actions_per_agent = actions;
  o.gamma = gamma;
  o.deterministic = true;
  return RandomTabularGame(o);
}

void BM_MixForward(benchmark::State& state) {
  const TabularGame g = Game(3);
  const FactorizedQ fq(g, FactorizedQSpec{});
  Rng rng = DeriveStream(1, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  const AugmentedState s = MakeAugmented(g, 0);
  const JointAction a{{1, 2}, {0, 1}};
  for (auto _ : state) benchmark::DoNotOptimize(MixForward(fq, p, s, a));
}
BENCHMARK(BM_MixForward);

void BM_MixForwardBackward(benchmark::State& state) {
  const TabularGame g = Game(3);
  const FactorizedQ fq(g, FactorizedQSpec{});
  Rng rng = DeriveStream(1, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  const AugmentedState s = MakeAugmented(g, 0);
  const JointAction a{{1, 2}, {0, 1}};
  std::vector<double> grad(fq.num_params());
  for (auto _ : state) {
    QTotTape tape;
    fq.Forward(p, s, a, &tape);
    fq.Backward(tape, 1.0, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_MixForwardBackward);

// Greedy TD target value: individual argmax versus exhaustive min-max over
// all joint actions.
void BM_TargetShortcut(benchmark::State& state) {
  const TabularGame g = Game(static_cast<int>(state.range(0)));
  const FactorizedQ fq(g, FactorizedQSpec{});
  Rng rng = DeriveStream(1, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  const AugmentedState s = MakeAugmented(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(GreedyValue(fq, p, s));
}
BENCHMARK(BM_TargetShortcut)->Arg(2)->Arg(3)->Arg(5);

void BM_TargetExhaustive(benchmark::State& state) {
  const TabularGame g = Game(static_cast<int>(state.range(0)));
  const FactorizedQ fq(g, FactorizedQSpec{});
  Rng rng = DeriveStream(1, streams::kInit);
  const std::vector<double> p = fq.InitialParams(rng);
  const AugmentedState s = MakeAugmented(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ExhaustiveMinMax(fq, p, s).value);
}
BENCHMARK(BM_TargetExhaustive)->Arg(2)->Arg(3)->Arg(5);

void BM_OracleSolve(benchmark::State& state) {
  const TabularGame g = Game(2, state.range(0) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(SolveSuperbQ(g, 1e-8).iterations);
}
BENCHMARK(BM_OracleSolve)->Arg(50)->Arg(90)->Arg(99);

}  // namespace
}  // namespace fm3q

BENCHMARK_MAIN();
