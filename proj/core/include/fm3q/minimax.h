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

#ifndef FM3Q_MINIMAX_H_
#define FM3Q_MINIMAX_H_

#include <cstdint>
#include <span>

namespace fm3q {

// Pure-strategy solution of a stage game q[a * nb + b] (Pro maximizes over
// joint a, Ant minimizes over joint b). All argmin/argmax ties go to the
// lowest joint index.
struct StageSolution {
  double value = 0.0;
  int64_t pro = 0;
  int64_t ant = 0;
};

// min_b max_a q. ant = argmin_b max_a q, pro = argmax_a q(., ant).
StageSolution MinMax(std::span<const double> q, int64_t na, int64_t nb);

// max_a min_b q. pro = argmax_a min_b q, ant = argmin_b q(pro, .).
StageSolution MaxMin(std::span<const double> q, int64_t na, int64_t nb);

// True if max_a min_b q == min_b max_a q within tol.
bool HasPureSaddle(std::span<const double> q, int64_t na, int64_t nb,
                   double tol = 1e-9);

}  // namespace fm3q

#endif  // FM3Q_MINIMAX_H_
