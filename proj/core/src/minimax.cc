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

#include "fm3q/minimax.h"

#include <cmath>

#include "fm3q/errors.h"

namespace fm3q {

namespace {

void Check(std::span<const double> q, int64_t na, int64_t nb) {
  if (na < 1 || nb < 1 || static_cast<int64_t>(q.size()) != na * nb) {
    throw InvalidArgument("stage game shape mismatch");
  }
}

}  // namespace

StageSolution MinMax(std::span<const double> q, int64_t na, int64_t nb) {
  Check(q, na, nb);
  StageSolution best;
  for (int64_t b = 0; b < nb; ++b) {
    int64_t arg = 0;
    double col_max = q[b];
    for (int64_t a = 1; a < na; ++a) {
      const double v = q[a * nb + b];
      if (v > col_max) {
        col_max = v;
        arg = a;
      }
    }
    if (b == 0 || col_max < best.value) best = {col_max, arg, b};
  }
  return best;
}

StageSolution MaxMin(std::span<const double> q, int64_t na, int64_t nb) {
  Check(q, na, nb);
  StageSolution best;
  for (int64_t a = 0; a < na; ++a) {
    int64_t arg = 0;
    double row_min = q[a * nb];
    for (int64_t b = 1; b < nb; ++b) {
      const double v = q[a * nb + b];
      if (v < row_min) {
        row_min = v;
        arg = b;
      }
    }
    if (a == 0 || row_min > best.value) best = {row_min, a, arg};
  }
  return best;
}

bool HasPureSaddle(std::span<const double> q, int64_t na, int64_t nb, double tol) {
  return std::abs(MinMax(q, na, nb).value - MaxMin(q, na, nb).value) <= tol;
}

}  // namespace fm3q
