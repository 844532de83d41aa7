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

#include "fm3q/finite_diff.h"

#include <algorithm>
#include <cmath>

#include "fm3q/errors.h"

namespace fm3q {

namespace {

void CheckEps(double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw InvalidArgument("finite difference step must lie in [1e-7, 1e-3]");
  }
}

}  // namespace

void AppendKinkPattern(const DenseNet& net, const Tape& tape, std::vector<int8_t>& out) {
  for (int k = 0; k < net.num_layers(); ++k) {
    if (!HasKink(net.activations()[k])) continue;
    for (double z : tape.pre_activation(k)) out.push_back(z > 0.0 ? 1 : (z < 0.0 ? -1 : 0));
  }
}

FiniteDiffReport FiniteDiffCheck(const ProbeFn& fn, std::span<const double> params,
                                 std::span<const double> analytic, double eps) {
  CheckEps(eps);
  if (analytic.size() != params.size()) {
    throw InvalidArgument("analytic gradient size does not match the parameters");
  }
  FiniteDiffReport report;
  std::vector<double> p(params.begin(), params.end());
  for (size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + eps;
    const Probe hi = fn(p);
    p[i] = saved - eps;
    const Probe lo = fn(p);
    p[i] = saved;
    if (hi.pattern != lo.pattern) {
      ++report.kinks;
      continue;
    }
    const double numeric = (hi.value - lo.value) / (2.0 * eps);
    const double a = std::abs(analytic[i]);
    const double n = std::abs(numeric);
    if (a < 1e-8 && n < 1e-8) {
      ++report.skipped_small;
      continue;
    }
    const double err = std::abs(analytic[i] - numeric) / std::max(a, n);
    ++report.compared;
    if (report.worst_index < 0 || err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_index = static_cast<int64_t>(i);
    }
  }
  return report;
}

FiniteDiffReport FiniteDiffCheck(const DenseNet& net, std::span<const double> params,
                                 std::span<const double> input, double eps,
                                 std::span<const double> upstream) {
  CheckEps(eps);
  std::vector<double> up(upstream.begin(), upstream.end());
  if (up.empty()) up.assign(net.output_size(), 1.0);
  if (static_cast<int>(up.size()) != net.output_size()) {
    throw InvalidArgument("upstream size does not match the net output");
  }
  const ProbeFn fn = [&](std::span<const double> p) {
    Tape tape;
    const std::vector<double> out = Forward(net, p, input, &tape);
    Probe probe;
    for (size_t k = 0; k < out.size(); ++k) probe.value += up[k] * out[k];
    AppendKinkPattern(net, tape, probe.pattern);
    return probe;
  };
  Tape tape;
  Forward(net, params, input, &tape);
  const Gradients g = Backward(tape, up);
  return FiniteDiffCheck(fn, params, g.params, eps);
}

}  // namespace fm3q
