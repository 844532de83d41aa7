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

#ifndef FM3Q_FINITE_DIFF_H_
#define FM3Q_FINITE_DIFF_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fm3q/dense_net.h"

namespace fm3q {

// Scalar function value plus the on/off pattern of every piecewise-linear
// unit it went through. Two probes whose patterns differ straddle a kink.
struct Probe {
  double value = 0.0;
  std::vector<int8_t> pattern;
};
using ProbeFn = std::function<Probe(std::span<const double>)>;

struct FiniteDiffReport {
  double max_relative_error = 0.0;
  // Coordinate holding max_relative_error, -1 if nothing was compared.
  int64_t worst_index = -1;
  int64_t compared = 0;
  // |analytic| and |numeric| both below 1e-8.
  int64_t skipped_small = 0;
  // The +eps and -eps probes straddle an activation kink.
  int64_t kinks = 0;
};

// Central differences (f(p + eps e_i) - f(p - eps e_i)) / (2 eps) against
// analytic[i] for every coordinate. Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|).
FiniteDiffReport FiniteDiffCheck(const ProbeFn& fn, std::span<const double> params,
                                 std::span<const double> analytic, double eps);

// Checks Backward for f(p) = upstream . net(p, input); upstream defaults to
// all ones. eps must lie in [1e-7, 1e-3].
FiniteDiffReport FiniteDiffCheck(const DenseNet& net, std::span<const double> params,
                                 std::span<const double> input, double eps,
                                 std::span<const double> upstream = {});

// Signs of the pre-activations of every kinked layer on a recorded tape.
void AppendKinkPattern(const DenseNet& net, const Tape& tape, std::vector<int8_t>& out);

}  // namespace fm3q

#endif  // FM3Q_FINITE_DIFF_H_
