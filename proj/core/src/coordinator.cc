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

#include "fm3q/coordinator.h"

#include <algorithm>
#include <numeric>
#include <utility>

#include "fm3q/errors.h"

namespace fm3q {

Coordinator::Coordinator(int updates_per_round, Rng sampling)
    : updates_(updates_per_round), rng_(std::move(sampling)) {
  if (updates_ < 1) throw InvalidArgument("updates per round must be at least 1");
}

size_t Coordinator::BatchSize(size_t buffer_size, int updates) {
  return std::max<size_t>(1, buffer_size / static_cast<size_t>(updates));
}

RoundPlan Coordinator::PlanRound(size_t buffer_size) {
  if (buffer_size == 0) throw InvalidArgument("cannot plan a round on an empty buffer");
  RoundPlan plan;
  plan.buffer_size = buffer_size;
  plan.updates = updates_;
  plan.batch_size = BatchSize(buffer_size, updates_);
  plan.partitioned = buffer_size % static_cast<size_t>(updates_) == 0;
  plan.batches.assign(updates_, {});
  if (plan.partitioned) {
    std::vector<size_t> perm(buffer_size);
    std::iota(perm.begin(), perm.end(), size_t{0});
    // Fisher-Yates on raw engine output.
    for (size_t i = buffer_size - 1; i > 0; --i) {
      const size_t j = static_cast<size_t>(UniformInt(rng_, static_cast<int>(i + 1)));
      std::swap(perm[i], perm[j]);
    }
    for (int u = 0; u < updates_; ++u) {
      plan.batches[u].assign(perm.begin() + u * plan.batch_size,
                             perm.begin() + (u + 1) * plan.batch_size);
    }
  } else {
    for (int u = 0; u < updates_; ++u) {
      plan.batches[u].resize(plan.batch_size);
      for (size_t& idx : plan.batches[u]) {
        idx = static_cast<size_t>(UniformInt(rng_, static_cast<int>(buffer_size)));
      }
    }
  }
  return plan;
}

bool Coordinator::LogConsistent(const std::vector<RoundRecord>& log, int updates) {
  for (const RoundRecord& r : log) {
    if (r.planned_updates != updates || r.optimizer_steps != updates) return false;
    if (r.batch_size != BatchSize(r.buffer_size, updates)) return false;
    if (!r.target_synced) return false;
  }
  return true;
}

}  // namespace fm3q
