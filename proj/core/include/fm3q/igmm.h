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

#ifndef FM3Q_IGMM_H_
#define FM3Q_IGMM_H_

#include <cstdint>
#include <span>
#include <string>

#include "fm3q/factorized_q.h"
#include "fm3q/minimax.h"

namespace fm3q {

// Outcome of comparing the joint minimax behavior of Q_tot with the
// individual greedy profile at one augmented state.
struct IgmmVerdict {
  bool consistent = false;
  StageSolution min_max;  // argmin_b max_a
  StageSolution max_min;  // argmax_a min_b
  int64_t individual_pro = 0;
  int64_t individual_ant = 0;
  double individual_value = 0.0;
  // Human-readable reason when inconsistent.
  std::string counterexample;
};

// Consistent iff the min-max profile, the max-min profile and the per-agent
// argmax profile coincide and the two orderings give values within tol.
// Throws InvalidArgument past the joint-action enumeration guard.
IgmmVerdict IgmmCheck(const FactorizedQ& fq, std::span<const double> params,
                      const AugmentedState& s, double tol = 1e-9);

// Same test on an explicit stage table q[a * nb + b] against a given
// individual profile.
IgmmVerdict IgmmCheckStage(std::span<const double> q, int64_t na, int64_t nb,
                           int64_t individual_pro, int64_t individual_ant,
                           double tol = 1e-9);

}  // namespace fm3q

#endif  // FM3Q_IGMM_H_
