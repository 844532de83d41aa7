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

#include "fm3q/policy.h"

#include <algorithm>

#include "fm3q/errors.h"

namespace fm3q {

FactorizedTeamPolicy::FactorizedTeamPolicy(std::shared_ptr<const FactorizedQ> model,
                                           std::vector<double> params, Team team)
    : TeamPolicy(team), model_(std::move(model)), params_(std::move(params)) {
  if (params_.size() != model_->num_params()) {
    throw InvalidArgument("parameter count does not match the model layout");
  }
}

std::vector<int> FactorizedTeamPolicy::Act(const AugmentedState& s) const {
  std::vector<int> out;
  for (int i = 0; i < model_->num_agents(team()); ++i) {
    const std::vector<double> q = model_->AgentQ(params_, s, team(), i);
    int best = 0;
    for (int k = 1; k < static_cast<int>(q.size()); ++k) {
      if (q[k] > q[best]) best = k;
    }
    out.push_back(best);
  }
  return out;
}

TablePolicy::TablePolicy(const Game& game, Team team, TeamTable table)
    : TeamPolicy(team), space_(game.actions(team)), table_(std::move(table)) {
  if (static_cast<int64_t>(table_.size()) != game.num_states()) {
    throw InvalidArgument("policy table is not total over the states");
  }
  for (int64_t x : table_) {
    if (x < 0 || x >= space_.joint_count()) throw InvalidArgument("invalid joint action in table");
  }
}

std::vector<int> TablePolicy::Act(const AugmentedState& s) const {
  return space_.Decode(table_.at(s.state));
}

std::vector<int> ScriptedPolicy::Act(const AugmentedState& s) const {
  return game_->ScriptedTeamAction(s.state, team());
}

PolicyPair ExtractPolicies(std::shared_ptr<const FactorizedQ> model,
                           const std::vector<double>& params) {
  return {std::make_shared<FactorizedTeamPolicy>(model, params, Team::kPro),
          std::make_shared<FactorizedTeamPolicy>(model, params, Team::kAnt)};
}

TeamTable ToTeamTable(const Game& game, const TeamPolicy& policy) {
  if (!game.enumerable()) throw InvalidArgument("policy tables need an enumerable game");
  TeamTable table(game.num_states());
  const ActionSpace& space = game.actions(policy.team());
  for (StateId s = 0; s < game.num_states(); ++s) {
    table[s] = space.Encode(policy.Act(MakeAugmented(game, s, std::max(1, policy.window()))));
  }
  return table;
}

TeamTable RandomTeamTable(const Game& game, Team team, Rng& rng) {
  TeamTable table(game.num_states());
  const int64_t n = game.actions(team).joint_count();
  for (int64_t& x : table) x = UniformInt(rng, static_cast<int>(n));
  return table;
}

}  // namespace fm3q
