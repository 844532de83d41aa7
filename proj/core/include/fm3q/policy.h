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

#ifndef FM3Q_POLICY_H_
#define FM3Q_POLICY_H_

#include <memory>
#include <string>
#include <vector>

#include "fm3q/factorized_q.h"
#include "fm3q/game.h"
#include "fm3q/oracle.h"

namespace fm3q {

// Deterministic decentralized policy of one team: per-agent actions from an
// augmented state.
class TeamPolicy {
 public:
  explicit TeamPolicy(Team team) : team_(team) {}
  virtual ~TeamPolicy() = default;

  Team team() const { return team_; }
  // History window the policy reads; 0 when it only looks at the state.
  virtual int window() const { return 0; }
  virtual std::vector<int> Act(const AugmentedState& s) const = 0;

 private:
  Team team_;
};

using TeamPolicyPtr = std::shared_ptr<const TeamPolicy>;

struct PolicyPair {
  TeamPolicyPtr pro;
  TeamPolicyPtr ant;
};

// Individual argmax of a factorized model (epsilon = 0).
class FactorizedTeamPolicy : public TeamPolicy {
 public:
  FactorizedTeamPolicy(std::shared_ptr<const FactorizedQ> model, std::vector<double> params,
                       Team team);
  int window() const override { return model_->spec().window; }
  std::vector<int> Act(const AugmentedState& s) const override;

 private:
  std::shared_ptr<const FactorizedQ> model_;
  std::vector<double> params_;
};

// Joint action per global state.
class TablePolicy : public TeamPolicy {
 public:
  TablePolicy(const Game& game, Team team, TeamTable table);
  std::vector<int> Act(const AugmentedState& s) const override;
  const TeamTable& table() const { return table_; }

 private:
  ActionSpace space_;
  TeamTable table_;
};

// The game's hand-written bot.
class ScriptedPolicy : public TeamPolicy {
 public:
  ScriptedPolicy(GamePtr game, Team team) : TeamPolicy(team), game_(std::move(game)) {}
  std::vector<int> Act(const AugmentedState& s) const override;

 private:
  GamePtr game_;
};

// Greedy pair of a factorized model.
PolicyPair ExtractPolicies(std::shared_ptr<const FactorizedQ> model,
                           const std::vector<double>& params);

// Tabulates a policy on every state of an enumerable game (fresh histories).
TeamTable ToTeamTable(const Game& game, const TeamPolicy& policy);

// Uniformly random deterministic table.
TeamTable RandomTeamTable(const Game& game, Team team, Rng& rng);

}  // namespace fm3q

#endif  // FM3Q_POLICY_H_
