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

#include "fm3q/oracle.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fm3q/errors.h"
#include "fm3q/minimax.h"

namespace fm3q {

namespace {

// Flattened (s, a, b) -> reward and outcome list, built once per solve.
struct Expanded {
  int64_t num_states;
  int64_t na;
  int64_t nb;
  std::vector<double> reward;
  std::vector<size_t> offset;  // size cells + 1
  std::vector<Outcome> outcomes;
  std::vector<uint8_t> terminal;

  size_t Cell(StateId s, int64_t a, int64_t b) const {
    return static_cast<size_t>((s * na + a) * nb + b);
  }
  double Backup(size_t cell, std::span<const double> v, double gamma) const {
    double acc = 0.0;
    for (size_t k = offset[cell]; k < offset[cell + 1]; ++k) {
      const Outcome& o = outcomes[k];
      if (!terminal[o.next]) acc += o.prob * v[o.next];
    }
    return reward[cell] + gamma * acc;
  }
};

Expanded Expand(const Game& game) {
  if (!game.enumerable()) {
    throw InvalidArgument("exact oracles need an enumerable game");
  }
  Expanded e;
  e.num_states = game.num_states();
  e.na = game.pro_actions().joint_count();
  e.nb = game.ant_actions().joint_count();
  if (e.na * e.nb > kMaxJointActions) {
    throw InvalidArgument("joint action count exceeds the enumeration guard");
  }
  const size_t cells = static_cast<size_t>(e.num_states * e.na * e.nb);
  e.reward.resize(cells);
  e.offset.resize(cells + 1);
  e.terminal.resize(e.num_states);
  for (StateId s = 0; s < e.num_states; ++s) e.terminal[s] = game.IsTerminal(s);
  size_t cell = 0;
  for (StateId s = 0; s < e.num_states; ++s) {
    for (int64_t a = 0; a < e.na; ++a) {
      for (int64_t b = 0; b < e.nb; ++b, ++cell) {
        e.reward[cell] = game.RewardJoint(s, a, b);
        e.offset[cell] = e.outcomes.size();
        for (const Outcome& o : game.TransitionJoint(s, a, b)) e.outcomes.push_back(o);
      }
    }
  }
  e.offset[cells] = e.outcomes.size();
  return e;
}

void CheckTable(const TeamTable& table, int64_t num_states, int64_t joint,
                const char* what) {
  if (static_cast<int64_t>(table.size()) != num_states) {
    throw InvalidArgument(std::string(what) + " policy is not total: expected " +
                          std::to_string(num_states) + " entries");
  }
  for (int64_t x : table) {
    if (x < 0 || x >= joint) {
      throw InvalidArgument(std::string(what) + " policy holds an invalid joint action");
    }
  }
}

double SupDiff(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

// Stop once gamma / (1 - gamma) * change < tol, which bounds the distance of
// the current iterate to the fixed point by tol.
bool ValueConverged(double change, double gamma, double tol) {
  return gamma * change < tol * (1.0 - gamma);
}

}  // namespace

int DefaultMaxIterations(double gamma, double tol, double reward_bound) {
  if (gamma <= 0.0) return 11;
  const double rmax = reward_bound > 0.0 ? reward_bound : 1.0;
  const double ratio = tol * (1.0 - gamma) / rmax;
  if (ratio >= 1.0) return 11;
  return static_cast<int>(std::ceil(std::log(ratio) / std::log(gamma))) + 10;
}

bool OracleSolution::SaddleEverywhere(double tol) const {
  for (int64_t s = 0; s < num_states; ++s) {
    if (std::abs(v_star[s] - v_maxmin[s]) > tol) return false;
  }
  return true;
}

nlohmann::json OracleSolution::ToJson() const {
  return {
      {"type", "oracle_solution"},
      {"num_states", num_states},
      {"pro_joint", pro_joint},
      {"ant_joint", ant_joint},
      {"gamma", gamma},
      {"q_star", {{"dims", {num_states, pro_joint, ant_joint}}, {"data", q_star}}},
      {"v_star", {{"dims", {num_states}}, {"data", v_star}}},
      {"v_maxmin", {{"dims", {num_states}}, {"data", v_maxmin}}},
      {"pro_policy", pro_policy},
      {"ant_policy", ant_policy},
      {"iterations", iterations},
      {"residual", residual},
  };
}

OracleSolution SolveSuperbQ(const Game& game, double tol, int max_iters) {
  const Expanded e = Expand(game);
  const double gamma = game.gamma();
  if (max_iters <= 0) max_iters = DefaultMaxIterations(gamma, tol, game.reward_bound());

  OracleSolution sol;
  sol.num_states = e.num_states;
  sol.pro_joint = e.na;
  sol.ant_joint = e.nb;
  sol.gamma = gamma;
  const size_t cells = e.reward.size();
  sol.q_star.assign(cells, 0.0);
  std::vector<double> next(cells);
  std::vector<double> v(e.num_states, 0.0);

  bool converged = false;
  for (int it = 1; it <= max_iters; ++it) {
    for (size_t c = 0; c < cells; ++c) next[c] = e.Backup(c, v, gamma);
    const double change = SupDiff(next, sol.q_star);
    sol.q_star.swap(next);
    sol.iterations = it;
    sol.residuals.push_back(change);
    sol.residual = change;
    for (StateId s = 0; s < e.num_states; ++s) {
      v[s] = MinMax(sol.Stage(s), e.na, e.nb).value;
    }
    // With gamma = 0 the operator is constant, so one application is exact.
    if (gamma == 0.0) {
      sol.residual = 0.0;
      converged = true;
      break;
    }
    if (change < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("superb Q value iteration did not converge in " +
                               std::to_string(max_iters) + " iterations (residual " +
                               std::to_string(sol.residual) + ")",
                           max_iters, sol.residual);
  }
  sol.v_star.resize(e.num_states);
  sol.v_maxmin.resize(e.num_states);
  sol.pro_policy.resize(e.num_states);
  sol.ant_policy.resize(e.num_states);
  for (StateId s = 0; s < e.num_states; ++s) {
    const StageSolution mm = MinMax(sol.Stage(s), e.na, e.nb);
    const StageSolution xm = MaxMin(sol.Stage(s), e.na, e.nb);
    sol.v_star[s] = mm.value;
    sol.v_maxmin[s] = xm.value;
    sol.ant_policy[s] = mm.ant;
    sol.pro_policy[s] = xm.pro;
  }
  return sol;
}

BestResponse SolveBestResponse(const Game& game, const TeamTable& opponent,
                               Team responder, double tol, int max_iters) {
  const Expanded e = Expand(game);
  const bool pro = responder == Team::kPro;
  CheckTable(opponent, e.num_states, pro ? e.nb : e.na, "opponent");
  const double gamma = game.gamma();
  if (max_iters <= 0) max_iters = DefaultMaxIterations(gamma, tol, game.reward_bound());

  BestResponse br;
  br.team = responder;
  br.opponent = opponent;
  br.values.assign(e.num_states, 0.0);
  br.policy.assign(e.num_states, 0);
  const int64_t own = pro ? e.na : e.nb;
  std::vector<double> next(e.num_states);
  bool converged = false;
  for (int it = 1; it <= max_iters; ++it) {
    for (StateId s = 0; s < e.num_states; ++s) {
      double best = 0.0;
      int64_t arg = 0;
      for (int64_t x = 0; x < own; ++x) {
        const size_t cell = pro ? e.Cell(s, x, opponent[s]) : e.Cell(s, opponent[s], x);
        const double q = e.Backup(cell, br.values, gamma);
        if (x == 0 || (pro ? q > best : q < best)) {
          best = q;
          arg = x;
        }
      }
      next[s] = best;
      br.policy[s] = arg;
    }
    const double change = SupDiff(next, br.values);
    br.values.swap(next);
    br.iterations = it;
    br.residual = change;
    if (ValueConverged(change, gamma, tol)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("best response did not converge", max_iters, br.residual);
  }
  return br;
}

std::vector<double> EvaluatePolicies(const Game& game, const TeamTable& pro,
                                     const TeamTable& ant, double tol) {
  const Expanded e = Expand(game);
  CheckTable(pro, e.num_states, e.na, "pro");
  CheckTable(ant, e.num_states, e.nb, "ant");
  const double gamma = game.gamma();
  const int max_iters = DefaultMaxIterations(gamma, tol, game.reward_bound());
  std::vector<double> v(e.num_states, 0.0), next(e.num_states);
  for (int it = 1; it <= max_iters; ++it) {
    for (StateId s = 0; s < e.num_states; ++s) {
      next[s] = e.Backup(e.Cell(s, pro[s], ant[s]), v, gamma);
    }
    const double change = SupDiff(next, v);
    v.swap(next);
    if (ValueConverged(change, gamma, tol)) return v;
  }
  throw ConvergenceError("policy evaluation did not converge", max_iters, 0.0);
}

double InitialValue(const Game& game, std::span<const double> values) {
  double acc = 0.0;
  for (const Outcome& o : game.InitialDistribution()) acc += o.prob * values[o.next];
  return acc;
}

NashConvResult NashConv(const Game& game, const TeamTable& pro, const TeamTable& ant,
                        double tol) {
  NashConvResult r;
  r.value = InitialValue(game, EvaluatePolicies(game, pro, ant, tol));
  r.pro_best_response =
      InitialValue(game, SolveBestResponse(game, ant, Team::kPro, tol).values);
  r.ant_best_response =
      InitialValue(game, SolveBestResponse(game, pro, Team::kAnt, tol).values);
  r.nashconv = r.pro_gain() + r.ant_gain();
  return r;
}

}  // namespace fm3q
