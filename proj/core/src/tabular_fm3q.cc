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

#include "fm3q/tabular_fm3q.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fm3q/errors.h"
#include "fm3q/minimax.h"

namespace fm3q {

namespace {

int ArgMax(const double* q, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

size_t Cell(const Dataset& d, StateId s, int64_t a, int64_t b) {
  return static_cast<size_t>((s * d.pro_joint + a) * d.ant_joint + b);
}

}  // namespace

std::vector<uint8_t> Dataset::Coverage() const {
  std::vector<uint8_t> cov(static_cast<size_t>(num_states * pro_joint * ant_joint), 0);
  for (const TabularTransition& t : items) cov[Cell(*this, t.state, t.pro, t.ant)] = 1;
  return cov;
}

bool Dataset::FullCoverage() const {
  const auto cov = Coverage();
  return std::all_of(cov.begin(), cov.end(), [](uint8_t c) { return c != 0; });
}

Dataset FullCoverageDataset(const Game& game, int samples_per_cell, Rng& rng) {
  if (!game.enumerable()) throw InvalidArgument("datasets need an enumerable game");
  if (samples_per_cell < 1) throw InvalidArgument("samples_per_cell must be positive");
  Dataset d;
  d.num_states = game.num_states();
  d.pro_joint = game.pro_actions().joint_count();
  d.ant_joint = game.ant_actions().joint_count();
  for (StateId s = 0; s < d.num_states; ++s) {
    for (int64_t a = 0; a < d.pro_joint; ++a) {
      for (int64_t b = 0; b < d.ant_joint; ++b) {
        const Distribution dist = game.TransitionJoint(s, a, b);
        const double r = game.RewardJoint(s, a, b);
        for (int k = 0; k < samples_per_cell; ++k) {
          const StateId next = SampleOutcome(dist, rng);
          d.items.push_back({s, a, b, r, next, game.IsTerminal(next)});
        }
      }
    }
  }
  return d;
}

Dataset DatasetFromSteps(const Game& game, std::span<const EpisodeStep> steps) {
  Dataset d;
  d.num_states = game.num_states();
  d.pro_joint = game.pro_actions().joint_count();
  d.ant_joint = game.ant_actions().joint_count();
  for (const EpisodeStep& step : steps) {
    if (step.state.window != 1) throw InvalidArgument("tabular datasets need window 1");
    d.items.push_back({step.state.state, game.pro_actions().Encode(step.action.pro),
                       game.ant_actions().Encode(step.action.ant), step.reward,
                       step.next.state, game.IsTerminal(step.next.state)});
  }
  return d;
}

std::pair<int64_t, int64_t> TabularFQ::IndividualProfile(StateId s) const {
  int64_t a = 0;
  for (size_t i = 0; i < pro_counts.size(); ++i) {
    a = a * pro_counts[i] + ArgMax(pro[i].data() + s * pro_counts[i], pro_counts[i]);
  }
  int64_t b = 0;
  for (size_t j = 0; j < ant_counts.size(); ++j) {
    b = b * ant_counts[j] + ArgMax(ant[j].data() + s * ant_counts[j], ant_counts[j]);
  }
  return {a, b};
}

double TabularFQ::Value(StateId s) const {
  const auto [a, b] = IndividualProfile(s);
  return q_tot[(s * pro_joint + a) * ant_joint + b];
}

TeamTable TabularFQ::Policy(Team team) const {
  TeamTable table(num_states);
  for (StateId s = 0; s < num_states; ++s) {
    const auto [a, b] = IndividualProfile(s);
    table[s] = team == Team::kPro ? a : b;
  }
  return table;
}

TabularFQ ZeroTabularFQ(const Game& game) {
  TabularFQ q;
  q.num_states = game.num_states();
  q.pro_counts = game.pro_actions().counts();
  q.ant_counts = game.ant_actions().counts();
  q.pro_joint = game.pro_actions().joint_count();
  q.ant_joint = game.ant_actions().joint_count();
  q.q_tot.assign(static_cast<size_t>(q.num_states * q.pro_joint * q.ant_joint), 0.0);
  for (int c : q.pro_counts) q.pro.emplace_back(static_cast<size_t>(q.num_states * c), 0.0);
  for (int c : q.ant_counts) q.ant.emplace_back(static_cast<size_t>(q.num_states * c), 0.0);
  return q;
}

TabularFQ RandomTabularFQ(const Game& game, Rng& rng, double scale) {
  TabularFQ q = ZeroTabularFQ(game);
  for (auto& t : q.pro) {
    for (double& x : t) x = scale * (2.0 * Uniform01(rng) - 1.0);
  }
  for (auto& t : q.ant) {
    for (double& x : t) x = scale * (2.0 * Uniform01(rng) - 1.0);
  }
  const ActionSpace& pa = game.pro_actions();
  const ActionSpace& aa = game.ant_actions();
  for (StateId s = 0; s < q.num_states; ++s) {
    for (int64_t a = 0; a < q.pro_joint; ++a) {
      const std::vector<int> ap = pa.Decode(a);
      for (int64_t b = 0; b < q.ant_joint; ++b) {
        const std::vector<int> bp = aa.Decode(b);
        double v = 0.0;
        for (size_t i = 0; i < ap.size(); ++i) v += q.pro[i][s * q.pro_counts[i] + ap[i]];
        for (size_t j = 0; j < bp.size(); ++j) v -= q.ant[j][s * q.ant_counts[j] + bp[j]];
        q.q_tot[(s * q.pro_joint + a) * q.ant_joint + b] = v;
      }
    }
  }
  return q;
}

TabularFQ ExactOperatorApply(const TabularFQ& q, const Dataset& data, double gamma) {
  if (data.num_states != q.num_states || data.pro_joint != q.pro_joint ||
      data.ant_joint != q.ant_joint) {
    throw InvalidArgument("dataset and Q table shapes differ");
  }
  const size_t cells = q.q_tot.size();
  std::vector<double> sum(cells, 0.0);
  std::vector<int64_t> count(cells, 0);
  std::vector<double> value(q.num_states);
  for (StateId s = 0; s < q.num_states; ++s) value[s] = q.Value(s);
  for (const TabularTransition& t : data.items) {
    const size_t c = Cell(data, t.state, t.pro, t.ant);
    sum[c] += t.done ? t.reward : t.reward + gamma * value[t.next];
    count[c] += 1;
  }
  std::vector<uint8_t> coverage(cells);
  size_t missing = 0;
  for (size_t c = 0; c < cells; ++c) {
    coverage[c] = count[c] > 0;
    missing += count[c] == 0;
  }
  if (missing > 0) {
    throw CoverageError(std::to_string(missing) + " of " + std::to_string(cells) +
                            " (state, pro, ant) cells have no sample",
                        std::move(coverage));
  }
  TabularFQ out = q;
  for (size_t c = 0; c < cells; ++c) out.q_tot[c] = sum[c] / static_cast<double>(count[c]);
  for (auto& t : out.pro) std::fill(t.begin(), t.end(), 0.0);
  for (auto& t : out.ant) std::fill(t.begin(), t.end(), 0.0);
  for (StateId s = 0; s < q.num_states; ++s) {
    const StageSolution mm = MinMax(out.Stage(s), q.pro_joint, q.ant_joint);
    int64_t a = mm.pro;
    for (int i = static_cast<int>(q.pro_counts.size()) - 1; i >= 0; --i) {
      out.pro[i][s * q.pro_counts[i] + a % q.pro_counts[i]] = 1.0;
      a /= q.pro_counts[i];
    }
    int64_t b = mm.ant;
    for (int j = static_cast<int>(q.ant_counts.size()) - 1; j >= 0; --j) {
      out.ant[j][s * q.ant_counts[j] + b % q.ant_counts[j]] = 1.0;
      b /= q.ant_counts[j];
    }
  }
  return out;
}

double EmpiricalBellmanError(const TabularFQ& candidate, const TabularFQ& source,
                             const Dataset& data, double gamma) {
  if (data.items.empty()) return 0.0;
  double acc = 0.0;
  for (const TabularTransition& t : data.items) {
    const double e = t.done ? t.reward : t.reward + gamma * source.Value(t.next);
    const double d = e - candidate.q_tot[Cell(data, t.state, t.pro, t.ant)];
    acc += d * d;
  }
  return acc / static_cast<double>(data.items.size());
}

double SupDistance(const TabularFQ& x, const TabularFQ& y) {
  if (x.q_tot.size() != y.q_tot.size()) throw InvalidArgument("Q table shapes differ");
  double d = 0.0;
  for (size_t i = 0; i < x.q_tot.size(); ++i) d = std::max(d, std::abs(x.q_tot[i] - y.q_tot[i]));
  return d;
}

OperatorRun IterateExactOperator(const Game& game, const Dataset& data, double tol,
                                 int max_iters) {
  OperatorRun run;
  run.q = ZeroTabularFQ(game);
  for (int it = 1; it <= max_iters; ++it) {
    TabularFQ next = ExactOperatorApply(run.q, data, game.gamma());
    const double change = SupDistance(next, run.q);
    run.q = std::move(next);
    run.iterations = it;
    run.residuals.push_back(change);
    if (change < tol) return run;
  }
  throw ConvergenceError("exact operator iteration did not converge", max_iters,
                         run.residuals.empty() ? 0.0 : run.residuals.back());
}

}  // namespace fm3q
