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

#ifndef FM3Q_COORDINATOR_H_
#define FM3Q_COORDINATOR_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fm3q/rng.h"

namespace fm3q {

// Indices into the replay buffer for one round of U updates.
struct RoundPlan {
  size_t buffer_size = 0;  // L
  size_t batch_size = 0;   // B = max(1, L / U)
  int updates = 0;         // U
  // true: a random permutation of the buffer cut into U disjoint batches.
  // false: every index drawn uniformly with replacement.
  bool partitioned = false;
  std::vector<std::vector<size_t>> batches;
};

// What actually happened in one round, recorded by the trainer.
struct RoundRecord {
  int64_t episode = 0;
  size_t buffer_size = 0;
  size_t batch_size = 0;
  int planned_updates = 0;
  int optimizer_steps = 0;
  // The target snapshot equals the training parameters bit for bit after
  // the refresh.
  bool target_synced = false;
};

// B = L / U rule with a target refresh after every round of U updates.
class Coordinator {
 public:
  Coordinator(int updates_per_round, Rng sampling);

  int updates_per_round() const { return updates_; }
  static size_t BatchSize(size_t buffer_size, int updates);

  // Requires buffer_size >= 1. Consumes sampling randomness.
  RoundPlan PlanRound(size_t buffer_size);

  void Record(const RoundRecord& record) { log_.push_back(record); }
  const std::vector<RoundRecord>& log() const { return log_; }
  // Every recorded round ran exactly U steps with B = max(1, L / U) and
  // ended in a bit-exact target sync.
  bool LogConsistent() const { return LogConsistent(log_, updates_); }
  static bool LogConsistent(const std::vector<RoundRecord>& log, int updates);

 private:
  int updates_;
  Rng rng_;
  std::vector<RoundRecord> log_;
};

}  // namespace fm3q

#endif  // FM3Q_COORDINATOR_H_
