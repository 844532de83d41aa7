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

#ifndef FM3Q_BASELINES_H_
#define FM3Q_BASELINES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fm3q/learner.h"
#include "fm3q/minimax.h"
#include "fm3q/oracle.h"
#include "fm3q/tabular_fm3q.h"

namespace fm3q {

// Independent-Q self-play: every agent owns a Q function of its own history,
// trained on its own reward (+r for Pro, -r for Ant) with its own batches,
// optimizer state and target snapshot, treating everybody else as part of
// the environment. The transitions every agent stores are identical, so the
// per-agent buffers share one storage; sampling is independent per agent.
struct IqlConfig {
  int64_t episodes = 1000;
  AdamOptions optimizer;
  Backend backend = Backend::kNeural;
  std::vector<int> hidden = {64, 64};
  int window = 1;
  BufferMode buffer_mode = BufferMode::kBounded;
  size_t buffer_capacity = 5000;
  int updates_per_round = 10;
  EpsilonSchedule epsilon;
  uint64_t seed = 0;
  int64_t checkpoint_every = 0;
  int64_t eval_every = 0;

  nlohmann::json ToJson() const;
  void Validate(const std::string& path = "train") const;
};

// The returned model is a FactorizedQ with an additive mixer whose mixer is
// never trained; only its individual networks matter. Checkpoints carry
// method "iql".
TrainResult TrainIndependent(GamePtr game, const IqlConfig& config,
                             const TrainHooks& hooks = {});

// Tabular Q over (s, a, b) with team joint action indices.
struct JointMinimaxQ {
  int64_t num_states = 0;
  int64_t pro_joint = 0;
  int64_t ant_joint = 0;
  std::vector<double> q;

  static JointMinimaxQ Zero(const Game& game);
  std::span<const double> Stage(StateId s) const {
    return {q.data() + s * pro_joint * ant_joint, static_cast<size_t>(pro_joint * ant_joint)};
  }
  double& at(StateId s, int64_t a, int64_t b) {
    return q[static_cast<size_t>((s * pro_joint + a) * ant_joint + b)];
  }
  double Value(StateId s) const { return MinMax(Stage(s), pro_joint, ant_joint).value; }
  // Pro plays argmax_a min_b, Ant plays argmin_b max_a.
  TeamTable Policy(Team team) const;
};

// Q(s,a,b) <- (1 - alpha) Q(s,a,b) + alpha (r + gamma min_b' max_a' Q(s',.,.)),
// with the bootstrap dropped on done transitions.
void JointMinimaxQUpdate(JointMinimaxQ& learner, const TabularTransition& t, double alpha,
                         double gamma);

// One in-order pass of updates over a dataset.
void JointMinimaxQSweep(JointMinimaxQ& learner, const Dataset& data, double alpha,
                        double gamma);

struct JointMinimaxConfig {
  int64_t episodes = 1000;
  double alpha = 0.5;
  EpsilonSchedule epsilon;
  uint64_t seed = 0;
  int64_t checkpoint_every = 0;
  int64_t eval_every = 0;

  nlohmann::json ToJson() const;
  void Validate(const std::string& path = "train") const;
};

struct JointMinimaxResult {
  JointMinimaxQ learner;
  std::vector<MetricsRow> metrics;
  std::vector<Checkpoint> checkpoints;
  int64_t total_steps = 0;
};

// Online joint minimax-Q with epsilon-greedy team joint actions.
JointMinimaxResult TrainJointMinimax(GamePtr game, const JointMinimaxConfig& config,
                                     const TrainHooks& hooks = {});

Checkpoint JointMinimaxCheckpoint(const JointMinimaxQ& learner, int64_t episode,
                                  uint64_t seed);

}  // namespace fm3q

#endif  // FM3Q_BASELINES_H_
