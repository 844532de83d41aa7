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

#ifndef FM3Q_GAME_H_
#define FM3Q_GAME_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fm3q/rng.h"
#include "json.hpp"

namespace fm3q {

using StateId = int64_t;

enum class Team { kPro, kAnt };

// Hard cap on |joint pro actions| * |joint ant actions| for anything that
// enumerates the joint action space (oracles, IGMM checks).
inline constexpr int64_t kMaxJointActions = 10000;

struct JointAction {
  std::vector<int> pro;
  std::vector<int> ant;

  bool operator==(const JointAction&) const = default;
};

struct Outcome {
  StateId next;
  double prob;
};
using Distribution = std::vector<Outcome>;

// Per-agent discrete action counts of one team plus mixed-radix encoding of
// joint actions. Agent 0 is the most significant digit, so lexicographic
// order of profiles equals numeric order of joint indices.
class ActionSpace {
 public:
  ActionSpace() = default;
  explicit ActionSpace(std::vector<int> counts);

  int num_agents() const { return static_cast<int>(counts_.size()); }
  int count(int agent) const { return counts_[agent]; }
  const std::vector<int>& counts() const { return counts_; }
  int64_t joint_count() const { return joint_count_; }

  int64_t Encode(std::span<const int> actions) const;
  std::vector<int> Decode(int64_t joint) const;
  // Throws InvalidArgument on wrong arity or out-of-range indices.
  void Validate(std::span<const int> actions) const;

 private:
  std::vector<int> counts_;
  int64_t joint_count_ = 1;
};

struct Observation {
  // Dense id usable as a table index; -1 when the observation is not
  // enumerable (e.g. radius-masked grid observations).
  int64_t id = -1;
  std::vector<double> features;
};

// A two-team zero-sum Markov game. Pro maximizes R, Ant receives -R.
// Instances are immutable after construction and may be shared freely
// between threads.
class Game {
 public:
  Game(std::vector<int> pro_counts, std::vector<int> ant_counts, double gamma,
       int horizon, double reward_bound);
  virtual ~Game() = default;

  const ActionSpace& pro_actions() const { return pro_; }
  const ActionSpace& ant_actions() const { return ant_; }
  const ActionSpace& actions(Team team) const {
    return team == Team::kPro ? pro_ : ant_;
  }
  int num_pro() const { return pro_.num_agents(); }
  int num_ant() const { return ant_.num_agents(); }
  double gamma() const { return gamma_; }
  int horizon() const { return horizon_; }
  double reward_bound() const { return reward_bound_; }

  virtual std::string type() const = 0;
  virtual int64_t num_states() const = 0;
  // True if the state space is small enough for exact oracles.
  virtual bool enumerable() const = 0;
  // True if every transition distribution has a single support point.
  virtual bool deterministic() const = 0;

  virtual Distribution Transition(StateId s, const JointAction& action) const;
  virtual Distribution TransitionJoint(StateId s, int64_t a, int64_t b) const = 0;
  virtual double Reward(StateId s, const JointAction& action) const;
  virtual double RewardJoint(StateId s, int64_t a, int64_t b) const = 0;
  virtual bool IsTerminal(StateId) const { return false; }
  virtual Distribution InitialDistribution() const = 0;

  virtual Observation Observe(StateId s, Team team, int agent) const = 0;
  virtual int observation_size() const = 0;
  virtual std::vector<double> StateFeatures(StateId s) const = 0;
  virtual int state_feature_size() const = 0;

  // Hand-written deterministic policy used as the evaluation bot. The default
  // plays, per state, the team joint action with the best immediate reward
  // averaged over a uniformly random opposing joint action.
  virtual std::vector<int> ScriptedTeamAction(StateId s, Team team) const;

  virtual nlohmann::json ToJson() const = 0;

  void ValidateAction(const JointAction& action) const;

 protected:
  void set_reward_bound(double bound) { reward_bound_ = bound; }

 private:
  ActionSpace pro_;
  ActionSpace ant_;
  double gamma_;
  int horizon_;
  double reward_bound_;
};

using GamePtr = std::shared_ptr<const Game>;

// Observation-action history of one agent: the last `window` observations
// (oldest first) and the actions taken after each of them. The newest slot's
// action is -1 until the agent acts.
struct HistorySlot {
  Observation obs;
  int action = -1;
};

struct AgentHistory {
  std::vector<HistorySlot> slots;
};

// s~ = <tau, v, s> plus the step index within the episode.
struct AugmentedState {
  StateId state = 0;
  int t = 0;
  int window = 1;
  std::vector<AgentHistory> pro;
  std::vector<AgentHistory> ant;

  const AgentHistory& history(Team team, int agent) const {
    return team == Team::kPro ? pro[agent] : ant[agent];
  }
};

struct EpisodeStep {
  AugmentedState state;
  JointAction action;
  double reward = 0.0;
  AugmentedState next;
  bool done = false;
};

// Fresh augmented state at step t for a known global state.
AugmentedState MakeAugmented(const Game& game, StateId s, int window = 1,
                             int t = 0);

// Samples an initial state and builds its augmented state.
AugmentedState Reset(const Game& game, Rng& rng, int window = 1);

// Samples s' ~ P(.|s,a,b), computes r = R(s,a,b), rolls the history windows
// forward. done is set when the step index reaches the horizon or s' is
// terminal.
EpisodeStep Step(const Game& game, const AugmentedState& state,
                 const JointAction& action, Rng& rng);

// Network input for an agent history: with window 1 exactly the current
// observation features; otherwise the concatenation over slots (oldest first,
// zero padded) of observation features and, for every slot but the newest, a
// one-hot of the action taken.
std::vector<double> HistoryFeatures(const AgentHistory& history, int window,
                                    int observation_size, int action_count);
int HistoryFeatureSize(int window, int observation_size, int action_count);

// Table index of a history. Only defined for window 1 on enumerable
// observations.
int64_t HistoryId(const AgentHistory& history);

// Samples from a distribution by inverse CDF.
StateId SampleOutcome(const Distribution& dist, Rng& rng);

}  // namespace fm3q

#endif  // FM3Q_GAME_H_
