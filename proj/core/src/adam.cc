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

#include "fm3q/adam.h"

#include <cmath>
#include <string>

#include "fm3q/errors.h"
#include "fm3q/json_util.h"

namespace fm3q {

void AdamStep(std::span<double> params, std::span<const double> grads, AdamState& state,
              const AdamOptions& o) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw InvalidArgument("adam: parameter, gradient and state sizes differ");
  }
  for (size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NonFiniteError("adam: non-finite gradient at coordinate " + std::to_string(i));
    }
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = o.beta1 * state.m[i] + (1.0 - o.beta1) * g;
    state.v[i] = o.beta2 * state.v[i] + (1.0 - o.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= o.lr * mhat / (std::sqrt(vhat) + o.eps);
  }
}

nlohmann::json AdamState::ToJson() const {
  return {{"t", t}, {"m", m}, {"v", v}};
}

AdamState AdamState::FromJson(const nlohmann::json& doc) {
  AdamState s;
  s.t = RequireField<int64_t>(doc, "t", "optimizer");
  s.m = RequireField<std::vector<double>>(doc, "m", "optimizer");
  s.v = RequireField<std::vector<double>>(doc, "v", "optimizer");
  if (s.m.size() != s.v.size()) throw ConfigError("optimizer.v", "moment sizes differ");
  return s;
}

}  // namespace fm3q
