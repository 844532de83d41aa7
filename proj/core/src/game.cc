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

#include "fm3q/game.h"

#include <limits>
#include <string>

#include "fm3q/errors.h"

namespace fm3q {

ActionSpace::ActionSpace(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw InvalidArgument("a team needs at least one agent");
  for (int c : counts_) {
    if (c < 1) throw InvalidArgument("action counts must be >= 1");
    if (joint_count_ > std::numeric_limits<int64_t>::max() / c) {
      throw InvalidArgument("joint action space overflows int64");
    }
    joint_count_ *= c;
  }
}

int64_t ActionSpace::Encode(std::span<const int> actions) const {
  int64_t index = 0;
  for (int i = 0; i < num_agents(); ++i) index = index * counts_[i] + actions[i];
  return index;
}

std::vector<int> ActionSpace::Decode(int64_t joint) const {
  std::vector<int> actions(counts_.size());
  for (int i = num_agents() - 1; i >= 0; --i) {
    actions[i] = static_cast<int>(joint % counts_[i]);
    joint /= counts_[i];
  }
  return actions;
}

void ActionSpace::Validate(std::span<const int> actions) const {
  if (static_cast<int>(actions.size()) != num_agents()) {
    throw InvalidArgument("joint action has " + std::to_string(actions.size()) +
                          " entries, expected " + std::to_string(num_agents()));
  }
  for (int i = 0; i < num_agents(); ++i) {
    if (actions[i] < 0 || actions[i] >= counts_[i]) {
      throw InvalidArgument("action " + std::to_string(actions[i]) +
                            " out of range for agent " + std::to_string(i));
    }
  }
}

Game::Game(std::vector<int> pro_counts, std::vector<int> ant_counts,
           double gamma, int horizon, double reward_bound)
    : pro_(std::move(pro_counts)),
      ant_(std::move(ant_counts)),
      gamma_(gamma),
      horizon_(horizon),
      reward_bound_(reward_bound) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidArgument("gamma must lie in [0, 1)");
  }
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
}

void Game::ValidateAction(const JointAction& action) const {
  pro_.Validate(action.pro);
  ant_.Validate(action.ant);
}

Distribution Game::Transition(StateId s, const JointAction& action) const {
  ValidateAction(action);
  return TransitionJoint(s, pro_.Encode(action.pro), ant_.Encode(action.ant));
}

double Game::Reward(StateId s, const JointAction& action) const {
  ValidateAction(action);
  return RewardJoint(s, pro_.Encode(action.pro), ant_.Encode(action.ant));
}

std::vector<int> Game::ScriptedTeamAction(StateId s, Team team) const {
  const int64_t na = pro_.joint_count();
  const int64_t nb = ant_.joint_count();
  if (na * nb > kMaxJointActions) {
    throw InvalidArgument("scripted bot: joint action space too large");
  }
  const bool pro = team == Team::kPro;
  const int64_t own = pro ? na : nb;
  int64_t best = 0;
  double best_value = 0.0;
  for (int64_t x = 0; x < own; ++x) {
    double total = 0.0;
    const int64_t other = pro ? nb : na;
    for (int64_t y = 0; y < other; ++y) {
      total += pro ? RewardJoint(s, x, y) : RewardJoint(s, y, x);
    }
    const double value = pro ? total : -total;
    if (x == 0 || value > best_value) {
      best = x;
      best_value = value;
    }
  }
  return actions(team).Decode(best);
}

namespace {

AgentHistory FreshHistory(Observation obs) {
  AgentHistory h;
  h.slots.push_back(HistorySlot{std::move(obs), -1});
  return h;
}

void Roll(AgentHistory& h, int action, Observation next_obs, int window) {
  h.slots.back().action = action;
  h.slots.push_back(HistorySlot{std::move(next_obs), -1});
  while (static_cast<int>(h.slots.size()) > window) h.slots.erase(h.slots.begin());
}

}  // namespace

AugmentedState MakeAugmented(const Game& game, StateId s, int window, int t) {
  if (window < 1) throw InvalidArgument("history window must be >= 1");
  AugmentedState out;
  out.state = s;
  out.t = t;
  out.window = window;
  out.pro.reserve(game.num_pro());
  for (int i = 0; i < game.num_pro(); ++i) {
    out.pro.push_back(FreshHistory(game.Observe(s, Team::kPro, i)));
  }
  out.ant.reserve(game.num_ant());
  for (int j = 0; j < game.num_ant(); ++j) {
    out.ant.push_back(FreshHistory(game.Observe(s, Team::kAnt, j)));
  }
  return out;
}

StateId SampleOutcome(const Distribution& dist, Rng& rng) {
  if (dist.size() == 1) return dist.front().next;
  const double u = Uniform01(rng);
  double acc = 0.0;
  for (const Outcome& o : dist) {
    acc += o.prob;
    if (u < acc) return o.next;
  }
  // Rounding left u above the cumulative sum; take the last support point.
  for (auto it = dist.rbegin(); it != dist.rend(); ++it) {
    if (it->prob > 0.0) return it->next;
  }
  return dist.back().next;
}

AugmentedState Reset(const Game& game, Rng& rng, int window) {
  return MakeAugmented(game, SampleOutcome(game.InitialDistribution(), rng),
                       window, 0);
}

EpisodeStep Step(const Game& game, const AugmentedState& state,
                 const JointAction& action, Rng& rng) {
  game.ValidateAction(action);
  const int64_t a = game.pro_actions().Encode(action.pro);
  const int64_t b = game.ant_actions().Encode(action.ant);
  EpisodeStep step;
  step.state = state;
  step.action = action;
  step.reward = game.RewardJoint(state.state, a, b);
  const StateId next = SampleOutcome(game.TransitionJoint(state.state, a, b), rng);

  step.next.state = next;
  step.next.t = state.t + 1;
  step.next.window = state.window;
  step.next.pro = state.pro;
  step.next.ant = state.ant;
  for (int i = 0; i < game.num_pro(); ++i) {
    Roll(step.next.pro[i], action.pro[i], game.Observe(next, Team::kPro, i),
         state.window);
  }
  for (int j = 0; j < game.num_ant(); ++j) {
    Roll(step.next.ant[j], action.ant[j], game.Observe(next, Team::kAnt, j),
         state.window);
  }
  step.done = step.next.t >= game.horizon() || game.IsTerminal(next);
  return step;
}

int HistoryFeatureSize(int window, int observation_size, int action_count) {
  if (window == 1) return observation_size;
  return window * observation_size + (window - 1) * action_count;
}

std::vector<double> HistoryFeatures(const AgentHistory& history, int window,
                                    int observation_size, int action_count) {
  if (window == 1) return history.slots.back().obs.features;
  std::vector<double> out(HistoryFeatureSize(window, observation_size, action_count),
                          0.0);
  const int slot_width = observation_size + action_count;
  const int offset = window - static_cast<int>(history.slots.size());
  for (size_t k = 0; k < history.slots.size(); ++k) {
    const int base = (offset + static_cast<int>(k)) * slot_width;
    const HistorySlot& slot = history.slots[k];
    for (int f = 0; f < observation_size; ++f) out[base + f] = slot.obs.features[f];
    if (slot.action >= 0 && k + 1 < history.slots.size()) {
      out[base + observation_size + slot.action] = 1.0;
    }
  }
  return out;
}

int64_t HistoryId(const AgentHistory& history) {
  if (history.slots.size() != 1) {
    throw InvalidArgument("tabular history ids require window 1");
  }
  const int64_t id = history.slots.front().obs.id;
  if (id < 0) throw InvalidArgument("observation is not enumerable");
  return id;
}

}  // namespace fm3q
