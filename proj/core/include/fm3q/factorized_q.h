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

#ifndef FM3Q_FACTORIZED_Q_H_
#define FM3Q_FACTORIZED_Q_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fm3q/dense_net.h"
#include "fm3q/game.h"
#include "fm3q/minimax.h"
#include "fm3q/mixer.h"
#include "json.hpp"

namespace fm3q {

enum class Backend { kNeural, kTabular };

struct FactorizedQSpec {
  Backend backend = Backend::kNeural;
  // Hidden layers of every individual network (relu), neural backend only.
  std::vector<int> hidden = {64, 64};
  MixerSpec mixer;
  // History window k of the individual inputs.
  int window = 1;

  nlohmann::json ToJson() const;
  static FactorizedQSpec FromJson(const nlohmann::json& doc, const std::string& path);
};

// Individual values of every agent at one augmented state plus the mixing
// weights of its global state: everything needed to evaluate Q_tot for any
// joint action without touching the networks again.
struct StateValues {
  std::vector<std::vector<double>> pro;
  std::vector<std::vector<double>> ant;
  MixWeights weights;
};

// Forward record of one Q_tot(s~, a, b) evaluation.
struct QTotTape {
  std::vector<Tape> pro;
  std::vector<Tape> ant;
  // Table rows used by the tabular backend.
  std::vector<int64_t> pro_rows;
  std::vector<int64_t> ant_rows;
  JointAction action;
  MixTape mix;
};

// Forward record of one individual Q_i(tau_i, a_i) evaluation.
struct AgentTape {
  Team team = Team::kPro;
  int agent = 0;
  int action = 0;
  int64_t row = 0;
  Tape net;
};

// Q_tot(s~, a, b) = Mix([Q_i^+(tau_i, a_i)], -[Q_j^-(v_j, b_j)], s). All
// parameters (individual networks or tables, then the mixer) live in one
// flat array described by layout(). The game must outlive the model.
class FactorizedQ {
 public:
  FactorizedQ(const Game& game, FactorizedQSpec spec);

  const Game& game() const { return *game_; }
  const FactorizedQSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  const Mixer& mixer() const { return mixer_; }
  size_t num_params() const { return layout_.size(); }
  int num_agents(Team team) const {
    return team == Team::kPro ? game_->num_pro() : game_->num_ant();
  }

  // Neural: uniform(+-1/sqrt(fan_in)). Tabular: zero tables. The mixer is
  // always drawn from rng.
  std::vector<double> InitialParams(Rng& rng) const;

  std::vector<double> AgentInput(const AugmentedState& s, Team team, int agent) const;
  std::vector<double> AgentQ(std::span<const double> params, const AugmentedState& s,
                             Team team, int agent) const;

  StateValues Evaluate(std::span<const double> params, const AugmentedState& s) const;
  double QTot(const StateValues& v, const JointAction& action) const;
  double QTotJoint(const StateValues& v, int64_t a, int64_t b) const;
  // Per-agent argmax profile, ties to the lowest action index.
  JointAction Greedy(const StateValues& v) const;

  double Forward(std::span<const double> params, const AugmentedState& s,
                 const JointAction& action, QTotTape* tape) const;
  // Adds upstream * dQ_tot/dparams into grad.
  void Backward(QTotTape& tape, double upstream, std::span<double> grad) const;
  // Individual value of one agent's action, for learners that train the
  // individual networks directly.
  double AgentValue(std::span<const double> params, const AugmentedState& s, Team team,
                    int agent, int action, AgentTape* tape) const;
  void AgentBackward(AgentTape& tape, double upstream, std::span<double> grad) const;
  // [begin, end) of one agent's parameters in the flat array.
  std::pair<size_t, size_t> AgentRange(Team team, int agent) const;

  // Sign pattern of every piecewise-linear unit touched by the tape.
  void KinkPattern(const QTotTape& tape, std::vector<int8_t>& out) const;

 private:
  const DenseNet& Net(Team team, int agent) const;
  int64_t TableRow(const AugmentedState& s, Team team, int agent) const;
  size_t TableOffset(Team team, int agent) const;

  const Game* game_;
  FactorizedQSpec spec_;
  ParamLayout layout_;
  std::vector<DenseNet> pro_nets_;
  std::vector<DenseNet> ant_nets_;
  std::vector<size_t> pro_tables_;
  std::vector<size_t> ant_tables_;
  int64_t table_rows_ = 0;
  Mixer mixer_;
};

// Q_tot at one (s~, a, b); records a tape when requested.
double MixForward(const FactorizedQ& fq, std::span<const double> params,
                  const AugmentedState& s, const JointAction& action,
                  QTotTape* tape = nullptr);

// epsilon-greedy per agent: with probability epsilon a uniform action,
// otherwise the individual argmax. The argmax is therefore played with
// probability 1 - epsilon + epsilon / |A_i|. No random draws when
// epsilon == 0.
JointAction SelectActions(const FactorizedQ& fq, std::span<const double> params,
                          const AugmentedState& s, double epsilon, Rng& rng);

JointAction GreedyActions(const FactorizedQ& fq, std::span<const double> params,
                          const AugmentedState& s);

// min_b max_a Q_tot(s~, ., .) over the team joint actions.
StageSolution ExhaustiveMinMax(const FactorizedQ& fq, std::span<const double> params,
                               const AugmentedState& s);

// Value of min_b' max_a' Q_tot(s~', a', b') read at the individual argmax
// profile. With cross_check the exhaustive value is computed too and an
// IgmmViolation thrown if the two differ by more than 1e-9.
double GreedyValue(const FactorizedQ& fq, std::span<const double> params,
                   const AugmentedState& s, bool cross_check = false);

// e = r + gamma * GreedyValue(target, s~'), and e = r on done steps.
double TdTarget(const FactorizedQ& fq, std::span<const double> target_params,
                const EpisodeStep& step, bool cross_check = false);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;
};

// mean_k (targets[k] - Q_tot(batch[k]))^2 and its gradient with respect to
// params. Throws NonFiniteError on a non-finite loss.
LossResult LossFromTargets(const FactorizedQ& fq, std::span<const double> params,
                           std::span<const EpisodeStep* const> batch,
                           std::span<const double> targets);

LossResult Loss(const FactorizedQ& fq, std::span<const double> params,
                std::span<const double> target_params,
                std::span<const EpisodeStep* const> batch, bool cross_check = false);

}  // namespace fm3q

#endif  // FM3Q_FACTORIZED_Q_H_
