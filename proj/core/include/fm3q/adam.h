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

#ifndef FM3Q_ADAM_H_
#define FM3Q_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace fm3q {

struct AdamOptions {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moment estimates plus the step count used for bias
// correction.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  int64_t t = 0;

  explicit AdamState(size_t n = 0) : m(n, 0.0), v(n, 0.0) {}

  nlohmann::json ToJson() const;
  static AdamState FromJson(const nlohmann::json& doc);
};

// One adaptive-moment update of params in place. Throws NonFiniteError, with
// the index of the first offending coordinate, before touching any state if
// a gradient is NaN or infinite. Throws InvalidArgument on shape mismatch.
void AdamStep(std::span<double> params, std::span<const double> grads, AdamState& state,
              const AdamOptions& options);

}  // namespace fm3q

#endif  // FM3Q_ADAM_H_
