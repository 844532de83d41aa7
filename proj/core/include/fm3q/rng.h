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

#ifndef FM3Q_RNG_H_
#define FM3Q_RNG_H_

#include <cstdint>
#include <random>

namespace fm3q {

// Every stochastic component draws from its own engine. The conversions below
// only use raw engine output, so streams are reproducible across standard
// library implementations (unlike std::uniform_real_distribution).
using Rng = std::mt19937_64;

// Per-task stream: (seed, task_id) -> engine, via std::seed_seq whose output
// is fully specified by the standard.
Rng DeriveStream(uint64_t seed, uint64_t task_id);

// Uniform double in [0, 1) with 53 random bits.
double Uniform01(Rng& rng);

// Uniform integer in [0, n). n must be positive.
int UniformInt(Rng& rng, int n);

// Well-known task ids for DeriveStream.
namespace streams {
inline constexpr uint64_t kInit = 1;
inline constexpr uint64_t kRollout = 2;
inline constexpr uint64_t kSampling = 3;
inline constexpr uint64_t kEval = 4;
inline constexpr uint64_t kGame = 5;
}  // namespace streams

}  // namespace fm3q

#endif  // FM3Q_RNG_H_
