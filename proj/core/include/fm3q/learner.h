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

#ifndef FM3Q_LEARNER_H_
#define FM3Q_LEARNER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fm3q/adam.h"
#include "fm3q/checkpoint.h"
#include "fm3q/coordinator.h"
#include "fm3q/factorized_q.h"
#include "fm3q/game.h"
#include "fm3q/replay_buffer.h"
#include "json.hpp"

namespace fm3q {

// Linear decay from start to end over the first decay_fraction of the
// episodes, constant afterwards.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.2;

  double At(int64_t episode, int64_t total_episodes) const;
  // Throws ConfigError (rooted at path) unless 0 < end <= start <= 1.
  void Validate(const std::string& path) const;
};

struct TrainConfig {
  int64_t episodes = 1000;
  AdamOptions optimizer;
  FactorizedQSpec model;
  BufferMode buffer_mode = BufferMode::kFull;
  size_t buffer_capacity = 0;
  int updates_per_round = 10;
  EpsilonSchedule epsilon;
  uint64_t seed = 0;
  // 0 disables periodic checkpoints; the final model is always
  // checkpointed when episodes > 0.
  int64_t checkpoint_every = 0;
  // Exact NashConv of the greedy pair every eval_every episodes (enumerable
  // games only); 0 disables.
  int64_t eval_every = 0;
  // Cross-check every TD target against exhaustive min-max.
  bool td_cross_check = false;

  nlohmann::json ToJson() const;
  // Throws ConfigError naming the field path.
  void Validate(const std::string& path = "train") const;
};

struct MetricsRow {
  int64_t episode = 0;
  double loss = 0.0;
  double epsilon = 0.0;
  size_t buffer_size = 0;
  size_t batch_size = 0;
  int updates = 0;
  int steps = 0;
  double episode_return = 0.0;
  std::optional<double> nashconv;
};

// Header plus one line per row; doubles in shortest round-trip form so equal
// runs produce byte-identical files.
std::string MetricsCsv(const std::vector<MetricsRow>& rows);

struct TrainHooks {
  std::function<void(const MetricsRow&)> on_metrics;
  std::function<void(const Checkpoint&)> on_checkpoint;
};

struct TrainResult {
  std::shared_ptr<const FactorizedQ> model;
  std::vector<double> params;
  std::vector<double> target_params;
  std::vector<MetricsRow> metrics;
  std::vector<Checkpoint> checkpoints;
  std::vector<RoundRecord> rounds;
  int64_t total_steps = 0;
  size_t final_buffer_size = 0;
};

// Online FM3Q: per episode an epsilon-greedy rollout into the buffer, then
// one coordinator round of U Adam steps on batches of B = max(1, L / U),
// then a target refresh. Deterministic given config.seed. The game must
// outlive the returned model.
TrainResult Train(GamePtr game, const TrainConfig& config, const TrainHooks& hooks = {});

// "episode,loss,..." formatting helper shared with the baselines.
std::string FormatDouble(double x);

}  // namespace fm3q

#endif  // FM3Q_LEARNER_H_
