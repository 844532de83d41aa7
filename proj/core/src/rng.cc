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

#include "fm3q/rng.h"

#include <cassert>

namespace fm3q {

Rng DeriveStream(uint64_t seed, uint64_t task_id) {
  std::seed_seq seq{static_cast<uint32_t>(seed & 0xffffffffu),
                    static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(task_id & 0xffffffffu),
                    static_cast<uint32_t>(task_id >> 32)};
  return Rng(seq);
}

double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int UniformInt(Rng& rng, int n) {
  assert(n > 0);
  // Rejection sampling keeps the draw exactly uniform.
  const uint64_t range = static_cast<uint64_t>(n);
  const uint64_t limit = Rng::max() - (Rng::max() % range);
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % range);
}

}  // namespace fm3q
