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

#include "fm3q/igmm.h"

#include <cmath>
#include <vector>

#include "fm3q/errors.h"

namespace fm3q {

IgmmVerdict IgmmCheckStage(std::span<const double> q, int64_t na, int64_t nb,
                           int64_t individual_pro, int64_t individual_ant, double tol) {
  if (na * nb > kMaxJointActions) {
    throw InvalidArgument("joint action count exceeds the enumeration guard");
  }
  IgmmVerdict v;
  v.min_max = MinMax(q, na, nb);
  v.max_min = MaxMin(q, na, nb);
  v.individual_pro = individual_pro;
  v.individual_ant = individual_ant;
  v.individual_value = q[individual_pro * nb + individual_ant];
  auto profile = [](int64_t a, int64_t b) {
    return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
  };
  if (std::abs(v.min_max.value - v.max_min.value) > tol) {
    v.counterexample = "min-max " + std::to_string(v.min_max.value) + " != max-min " +
                       std::to_string(v.max_min.value);
  } else if (v.min_max.pro != individual_pro || v.min_max.ant != individual_ant) {
    v.counterexample = "min-max profile " + profile(v.min_max.pro, v.min_max.ant) +
                       " != individual profile " + profile(individual_pro, individual_ant);
  } else if (v.max_min.pro != individual_pro || v.max_min.ant != individual_ant) {
    v.counterexample = "max-min profile " + profile(v.max_min.pro, v.max_min.ant) +
                       " != individual profile " + profile(individual_pro, individual_ant);
  } else {
    v.consistent = true;
  }
  return v;
}

IgmmVerdict IgmmCheck(const FactorizedQ& fq, std::span<const double> params,
                      const AugmentedState& s, double tol) {
  const Game& game = fq.game();
  const int64_t na = game.pro_actions().joint_count();
  const int64_t nb = game.ant_actions().joint_count();
  if (na * nb > kMaxJointActions) {
    throw InvalidArgument("joint action count exceeds the enumeration guard");
  }
  const StateValues values = fq.Evaluate(params, s);
  std::vector<double> stage(na * nb);
  for (int64_t a = 0; a < na; ++a) {
    for (int64_t b = 0; b < nb; ++b) stage[a * nb + b] = fq.QTotJoint(values, a, b);
  }
  const JointAction greedy = fq.Greedy(values);
  return IgmmCheckStage(stage, na, nb, game.pro_actions().Encode(greedy.pro),
                        game.ant_actions().Encode(greedy.ant), tol);
}

}  // namespace fm3q
