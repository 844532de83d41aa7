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

#include "fm3q/grid_game.h"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "fm3q/errors.h"

namespace fm3q {

namespace {

constexpr int kDx[GridKeepawayGame::kNumActions] = {0, 0, -1, 1, 0};
constexpr int kDy[GridKeepawayGame::kNumActions] = {1, -1, 0, 0, 0};

bool Inside(const std::array<int, 2>& p, int side) {
  return p[0] >= 0 && p[0] < side && p[1] >= 0 && p[1] < side;
}

}  // namespace

GridConfig GridConfig::ForSide(int side) {
  GridConfig c;
  c.side = side;
  const int hi = side - 1;
  c.start = {{{0, 0}, {0, hi}, {hi, 0}, {hi, hi}}};
  c.target = {side / 2, side / 2};
  return c;
}

GridKeepawayGame::GridKeepawayGame(GridConfig config)
    : Game({kNumActions, kNumActions}, {kNumActions, kNumActions}, config.gamma,
           config.horizon, 1.0),
      config_(config) {
  if (config_.side < 3 || config_.side > 7) {
    throw InvalidArgument("grid side must lie in [3, 7], got " +
                          std::to_string(config_.side));
  }
  if (config_.horizon < 1 || config_.horizon > 50) {
    throw InvalidArgument("grid horizon must lie in [1, 50]");
  }
  if (!Inside(config_.target, config_.side)) {
    throw InvalidArgument("grid target outside the board");
  }
  for (int k = 0; k < kNumAgents; ++k) {
    if (!Inside(config_.start[k], config_.side)) {
      throw InvalidArgument("grid start position outside the board");
    }
    for (int q = 0; q < k; ++q) {
      if (config_.start[k] == config_.start[q]) {
        throw InvalidArgument("grid start positions must be distinct");
      }
    }
  }
  const int64_t cells = static_cast<int64_t>(config_.side) * config_.side;
  num_states_ = cells * cells * cells * cells;
}

GridKeepawayGame::Positions GridKeepawayGame::Decode(StateId s) const {
  if (s < 0 || s >= num_states_) throw InvalidArgument("grid state out of range");
  const int64_t cells = static_cast<int64_t>(config_.side) * config_.side;
  Positions p;
  for (int k = 0; k < kNumAgents; ++k) {
    const int cell = static_cast<int>(s % cells);
    s /= cells;
    p[k] = {cell % config_.side, cell / config_.side};
  }
  return p;
}

StateId GridKeepawayGame::Encode(const Positions& p) const {
  const int64_t cells = static_cast<int64_t>(config_.side) * config_.side;
  StateId s = 0;
  for (int k = kNumAgents - 1; k >= 0; --k) {
    s = s * cells + p[k][1] * config_.side + p[k][0];
  }
  return s;
}

GridKeepawayGame::Positions GridKeepawayGame::Resolve(
    const Positions& current, const std::array<int, kNumAgents>& moves) const {
  Positions next;
  for (int k = 0; k < kNumAgents; ++k) {
    std::array<int, 2> p = {current[k][0] + kDx[moves[k]], current[k][1] + kDy[moves[k]]};
    next[k] = Inside(p, config_.side) ? p : current[k];
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < kNumAgents; ++p) {
      for (int q = p + 1; q < kNumAgents; ++q) {
        if (next[p] != current[p] && next[p] == current[q] && next[q] == current[p]) {
          next[p] = current[p];
          next[q] = current[q];
          changed = true;
        }
      }
    }
    for (int p = 0; p < kNumAgents; ++p) {
      for (int q = p + 1; q < kNumAgents; ++q) {
        if (next[p] != next[q]) continue;
        // A stayer cannot be displaced; otherwise the lower index wins.
        const bool q_stays = next[q] == current[q];
        const int loser = q_stays ? p : q;
        next[loser] = current[loser];
        changed = true;
      }
    }
  }
  return next;
}

double GridKeepawayGame::TargetReward(const Positions& p) const {
  double r = 0.0;
  for (int k = 0; k < kNumAgents; ++k) {
    if (p[k] == config_.target) r += k < 2 ? 1.0 : -1.0;
  }
  return std::clamp(r, -1.0, 1.0);
}

Distribution GridKeepawayGame::TransitionJoint(StateId s, int64_t a, int64_t b) const {
  const std::vector<int> pro = pro_actions().Decode(a);
  const std::vector<int> ant = ant_actions().Decode(b);
  const Positions next = Resolve(Decode(s), {pro[0], pro[1], ant[0], ant[1]});
  return {{Encode(next), 1.0}};
}

double GridKeepawayGame::RewardJoint(StateId s, int64_t a, int64_t b) const {
  const std::vector<int> pro = pro_actions().Decode(a);
  const std::vector<int> ant = ant_actions().Decode(b);
  return TargetReward(Resolve(Decode(s), {pro[0], pro[1], ant[0], ant[1]}));
}

Distribution GridKeepawayGame::InitialDistribution() const {
  return {{Encode(config_.start), 1.0}};
}

Observation GridKeepawayGame::Observe(StateId s, Team team, int agent) const {
  const Positions p = Decode(s);
  const int self = team == Team::kPro ? agent : 2 + agent;
  const int mate = team == Team::kPro ? 1 - agent : 2 + (1 - agent);
  const int opp0 = team == Team::kPro ? 2 : 0;
  const double scale = 1.0 / (config_.side - 1);
  Observation obs;
  obs.id = config_.observation_radius < 0 ? s : -1;
  std::vector<double>& f = obs.features;
  f.reserve(observation_size());
  f.push_back(p[self][0] * scale);
  f.push_back(p[self][1] * scale);
  auto other = [&](int k) {
    const int dist = std::max(std::abs(p[k][0] - p[self][0]), std::abs(p[k][1] - p[self][1]));
    const bool visible = config_.observation_radius < 0 || dist <= config_.observation_radius;
    f.push_back(visible ? p[k][0] * scale : 0.0);
    f.push_back(visible ? p[k][1] * scale : 0.0);
    f.push_back(visible ? 1.0 : 0.0);
  };
  other(mate);
  other(opp0);
  other(opp0 + 1);
  f.push_back((config_.target[0] - p[self][0]) * scale);
  f.push_back((config_.target[1] - p[self][1]) * scale);
  return obs;
}

std::vector<double> GridKeepawayGame::StateFeatures(StateId s) const {
  const Positions p = Decode(s);
  const double scale = 1.0 / (config_.side - 1);
  std::vector<double> f;
  f.reserve(state_feature_size());
  for (const auto& q : p) {
    f.push_back(q[0] * scale);
    f.push_back(q[1] * scale);
  }
  f.push_back(config_.target[0] * scale);
  f.push_back(config_.target[1] * scale);
  return f;
}

std::vector<int> GridKeepawayGame::ScriptedTeamAction(StateId s, Team team) const {
  const Positions p = Decode(s);
  std::vector<int> out;
  const int first = team == Team::kPro ? 0 : 2;
  for (int k = first; k < first + 2; ++k) {
    const int dx = config_.target[0] - p[k][0];
    const int dy = config_.target[1] - p[k][1];
    if (dx == 0 && dy == 0) {
      out.push_back(kStay);
    } else if (std::abs(dx) >= std::abs(dy)) {
      out.push_back(dx > 0 ? kRight : kLeft);
    } else {
      out.push_back(dy > 0 ? kUp : kDown);
    }
  }
  return out;
}

nlohmann::json GridKeepawayGame::ToJson() const {
  nlohmann::json start = nlohmann::json::array();
  for (const auto& q : config_.start) start.push_back({q[0], q[1]});
  return {
      {"type", "grid"},
      {"side", config_.side},
      {"horizon", config_.horizon},
      {"gamma", config_.gamma},
      {"target", {config_.target[0], config_.target[1]}},
      {"start", start},
      {"observation_radius", config_.observation_radius},
  };
}

}  // namespace fm3q
