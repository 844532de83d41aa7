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

#include "fm3q/factorized_q.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fm3q/errors.h"
#include "fm3q/finite_diff.h"
#include "fm3q/json_util.h"

namespace fm3q {

namespace {

int ArgMax(const std::vector<double>& q) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

}  // namespace

nlohmann::json FactorizedQSpec::ToJson() const {
  return {{"backend", backend == Backend::kNeural ? "neural" : "tabular"},
          {"hidden", hidden},
          {"mixer", mixer.ToJson()},
          {"window", window}};
}

FactorizedQSpec FactorizedQSpec::FromJson(const nlohmann::json& doc, const std::string& path) {
  FactorizedQSpec spec;
  const auto backend = OptionalField<std::string>(doc, "backend", path, "neural");
  if (backend == "neural") {
    spec.backend = Backend::kNeural;
  } else if (backend == "tabular") {
    spec.backend = Backend::kTabular;
  } else {
    throw ConfigError(JoinPath(path, "backend"), "expected neural or tabular");
  }
  spec.hidden = OptionalField<std::vector<int>>(doc, "hidden", path, spec.hidden);
  for (int h : spec.hidden) {
    if (h < 1) throw ConfigError(JoinPath(path, "hidden"), "layer sizes must be positive");
  }
  if (doc.is_object() && doc.contains("mixer")) {
    spec.mixer = MixerSpec::FromJson(doc.at("mixer"), JoinPath(path, "mixer"));
  }
  spec.window = OptionalField<int>(doc, "window", path, 1);
  if (spec.window < 1) throw ConfigError(JoinPath(path, "window"), "must be at least 1");
  return spec;
}

FactorizedQ::FactorizedQ(const Game& game, FactorizedQSpec spec)
    : game_(&game), spec_(std::move(spec)) {
  if (spec_.backend == Backend::kTabular) {
    if (spec_.window != 1 || !game.enumerable()) {
      throw InvalidArgument("the tabular backend needs window 1 on an enumerable game");
    }
    table_rows_ = game.num_states();
    for (int i = 0; i < game.num_pro(); ++i) {
      pro_tables_.push_back(layout_.Add("pro" + std::to_string(i) + "/table", table_rows_,
                                        game.pro_actions().count(i)));
    }
    for (int j = 0; j < game.num_ant(); ++j) {
      ant_tables_.push_back(layout_.Add("ant" + std::to_string(j) + "/table", table_rows_,
                                        game.ant_actions().count(j)));
    }
  } else {
    auto make = [&](int actions) {
      std::vector<int> sizes = {
          HistoryFeatureSize(spec_.window, game.observation_size(), actions)};
      std::vector<Activation> acts;
      for (int h : spec_.hidden) {
        sizes.push_back(h);
        acts.push_back(Activation::kRelu);
      }
      sizes.push_back(actions);
      acts.push_back(Activation::kIdentity);
      return DenseNet(sizes, acts);
    };
    for (int i = 0; i < game.num_pro(); ++i) {
      pro_nets_.push_back(make(game.pro_actions().count(i)));
      pro_nets_.back().Register(layout_, "pro" + std::to_string(i));
    }
    for (int j = 0; j < game.num_ant(); ++j) {
      ant_nets_.push_back(make(game.ant_actions().count(j)));
      ant_nets_.back().Register(layout_, "ant" + std::to_string(j));
    }
  }
  mixer_ = Mixer(spec_.mixer, game.num_pro() + game.num_ant(), game.state_feature_size());
  mixer_.Register(layout_);
}

std::vector<double> FactorizedQ::InitialParams(Rng& rng) const {
  std::vector<double> params(layout_.size(), 0.0);
  for (const DenseNet& net : pro_nets_) net.Initialize(params, rng);
  for (const DenseNet& net : ant_nets_) net.Initialize(params, rng);
  mixer_.Initialize(params, rng);
  return params;
}

const DenseNet& FactorizedQ::Net(Team team, int agent) const {
  return team == Team::kPro ? pro_nets_[agent] : ant_nets_[agent];
}

size_t FactorizedQ::TableOffset(Team team, int agent) const {
  return team == Team::kPro ? pro_tables_[agent] : ant_tables_[agent];
}

int64_t FactorizedQ::TableRow(const AugmentedState& s, Team team, int agent) const {
  const int64_t row = HistoryId(s.history(team, agent));
  if (row < 0 || row >= table_rows_) {
    throw InvalidArgument("observation id outside the tabular backend's table");
  }
  return row;
}

std::vector<double> FactorizedQ::AgentInput(const AugmentedState& s, Team team,
                                            int agent) const {
  return HistoryFeatures(s.history(team, agent), spec_.window, game_->observation_size(),
                         game_->actions(team).count(agent));
}

std::vector<double> FactorizedQ::AgentQ(std::span<const double> params,
                                        const AugmentedState& s, Team team,
                                        int agent) const {
  if (spec_.backend == Backend::kTabular) {
    const int count = game_->actions(team).count(agent);
    const double* row = params.data() + TableOffset(team, agent) + TableRow(s, team, agent) * count;
    return std::vector<double>(row, row + count);
  }
  return fm3q::Forward(Net(team, agent), params, AgentInput(s, team, agent));
}

StateValues FactorizedQ::Evaluate(std::span<const double> params,
                                  const AugmentedState& s) const {
  StateValues v;
  for (int i = 0; i < game_->num_pro(); ++i) v.pro.push_back(AgentQ(params, s, Team::kPro, i));
  for (int j = 0; j < game_->num_ant(); ++j) v.ant.push_back(AgentQ(params, s, Team::kAnt, j));
  if (spec_.mixer.kind == MixerKind::kHypernetwork) {
    v.weights = mixer_.Weights(params, game_->StateFeatures(s.state));
  }
  return v;
}

double FactorizedQ::QTot(const StateValues& v, const JointAction& action) const {
  std::vector<double> q;
  q.reserve(v.pro.size() + v.ant.size());
  for (size_t i = 0; i < v.pro.size(); ++i) q.push_back(v.pro[i][action.pro[i]]);
  for (size_t j = 0; j < v.ant.size(); ++j) q.push_back(-v.ant[j][action.ant[j]]);
  return Mixer::Mix(v.weights, q);
}

double FactorizedQ::QTotJoint(const StateValues& v, int64_t a, int64_t b) const {
  JointAction action{game_->pro_actions().Decode(a), game_->ant_actions().Decode(b)};
  return QTot(v, action);
}

JointAction FactorizedQ::Greedy(const StateValues& v) const {
  JointAction action;
  for (const auto& q : v.pro) action.pro.push_back(ArgMax(q));
  for (const auto& q : v.ant) action.ant.push_back(ArgMax(q));
  return action;
}

double FactorizedQ::Forward(std::span<const double> params, const AugmentedState& s,
                            const JointAction& action, QTotTape* tape) const {
  game_->ValidateAction(action);
  const int n = game_->num_pro();
  const int m = game_->num_ant();
  std::vector<double> q(n + m);
  if (tape) {
    tape->action = action;
    tape->pro.assign(spec_.backend == Backend::kNeural ? n : 0, Tape{});
    tape->ant.assign(spec_.backend == Backend::kNeural ? m : 0, Tape{});
    tape->pro_rows.clear();
    tape->ant_rows.clear();
  }
  for (int k = 0; k < n + m; ++k) {
    const Team team = k < n ? Team::kPro : Team::kAnt;
    const int agent = k < n ? k : k - n;
    const int act = k < n ? action.pro[agent] : action.ant[agent];
    double value;
    if (spec_.backend == Backend::kTabular) {
      const int64_t row = TableRow(s, team, agent);
      const int count = game_->actions(team).count(agent);
      value = params[TableOffset(team, agent) + row * count + act];
      if (tape) (k < n ? tape->pro_rows : tape->ant_rows).push_back(row);
    } else {
      Tape* t = tape ? &(k < n ? tape->pro[agent] : tape->ant[agent]) : nullptr;
      value = fm3q::Forward(Net(team, agent), params, AgentInput(s, team, agent), t)[act];
    }
    q[k] = k < n ? value : -value;
  }
  return mixer_.Forward(params, game_->StateFeatures(s.state), q, tape ? &tape->mix : nullptr);
}

void FactorizedQ::Backward(QTotTape& tape, double upstream, std::span<double> grad) const {
  const std::vector<double> dq = mixer_.Backward(tape.mix, upstream, grad);
  const int n = game_->num_pro();
  const int m = game_->num_ant();
  for (int k = 0; k < n + m; ++k) {
    const Team team = k < n ? Team::kPro : Team::kAnt;
    const int agent = k < n ? k : k - n;
    const int act = k < n ? tape.action.pro[agent] : tape.action.ant[agent];
    // The negation module flips the sign of every Ant input.
    const double g = k < n ? dq[k] : -dq[k];
    if (spec_.backend == Backend::kTabular) {
      const int count = game_->actions(team).count(agent);
      const int64_t row = k < n ? tape.pro_rows[agent] : tape.ant_rows[agent];
      grad[TableOffset(team, agent) + row * count + act] += g;
    } else {
      std::vector<double> up(game_->actions(team).count(agent), 0.0);
      up[act] = g;
      BackwardAccumulate(k < n ? tape.pro[agent] : tape.ant[agent], up, grad);
    }
  }
}

double FactorizedQ::AgentValue(std::span<const double> params, const AugmentedState& s,
                               Team team, int agent, int action, AgentTape* tape) const {
  const int count = game_->actions(team).count(agent);
  if (action < 0 || action >= count) throw InvalidArgument("invalid action index");
  if (tape) {
    tape->team = team;
    tape->agent = agent;
    tape->action = action;
  }
  if (spec_.backend == Backend::kTabular) {
    const int64_t row = TableRow(s, team, agent);
    if (tape) tape->row = row;
    return params[TableOffset(team, agent) + row * count + action];
  }
  return fm3q::Forward(Net(team, agent), params, AgentInput(s, team, agent),
                       tape ? &tape->net : nullptr)[action];
}

void FactorizedQ::AgentBackward(AgentTape& tape, double upstream,
                                std::span<double> grad) const {
  const int count = game_->actions(tape.team).count(tape.agent);
  if (spec_.backend == Backend::kTabular) {
    grad[TableOffset(tape.team, tape.agent) + tape.row * count + tape.action] += upstream;
    return;
  }
  std::vector<double> up(count, 0.0);
  up[tape.action] = upstream;
  BackwardAccumulate(tape.net, up, grad);
}

std::pair<size_t, size_t> FactorizedQ::AgentRange(Team team, int agent) const {
  const std::string prefix = (team == Team::kPro ? "pro" : "ant") + std::to_string(agent) + "/";
  size_t begin = layout_.size();
  size_t end = 0;
  for (const ParamBlock& b : layout_.blocks()) {
    if (b.name.rfind(prefix, 0) == 0) {
      begin = std::min(begin, b.offset);
      end = std::max(end, b.offset + b.size());
    }
  }
  return {begin, end};
}

void FactorizedQ::KinkPattern(const QTotTape& tape, std::vector<int8_t>& out) const {
  for (size_t i = 0; i < tape.pro.size(); ++i) AppendKinkPattern(pro_nets_[i], tape.pro[i], out);
  for (size_t j = 0; j < tape.ant.size(); ++j) AppendKinkPattern(ant_nets_[j], tape.ant[j], out);
  if (spec_.mixer.kind != MixerKind::kHypernetwork) return;
  if (spec_.mixer.transform == WeightTransform::kAbs) {
    for (double x : tape.mix.raw_w1) out.push_back(x > 0.0 ? 1 : (x < 0.0 ? -1 : 0));
    for (double x : tape.mix.raw_w2) out.push_back(x > 0.0 ? 1 : (x < 0.0 ? -1 : 0));
  }
  for (double z : tape.mix.b2_tape.pre_activation(0)) out.push_back(z > 0.0 ? 1 : (z < 0.0 ? -1 : 0));
}

// ---------------------------------------------------------------------------

double MixForward(const FactorizedQ& fq, std::span<const double> params,
                  const AugmentedState& s, const JointAction& action, QTotTape* tape) {
  return fq.Forward(params, s, action, tape);
}

JointAction SelectActions(const FactorizedQ& fq, std::span<const double> params,
                          const AugmentedState& s, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in [0, 1]");
  const StateValues v = fq.Evaluate(params, s);
  JointAction action = fq.Greedy(v);
  if (epsilon == 0.0) return action;
  auto explore = [&](std::vector<int>& acts, const std::vector<std::vector<double>>& qs) {
    for (size_t i = 0; i < acts.size(); ++i) {
      if (Uniform01(rng) < epsilon) acts[i] = UniformInt(rng, static_cast<int>(qs[i].size()));
    }
  };
  explore(action.pro, v.pro);
  explore(action.ant, v.ant);
  return action;
}

JointAction GreedyActions(const FactorizedQ& fq, std::span<const double> params,
                          const AugmentedState& s) {
  return fq.Greedy(fq.Evaluate(params, s));
}

StageSolution ExhaustiveMinMax(const FactorizedQ& fq, std::span<const double> params,
                               const AugmentedState& s) {
  const Game& game = fq.game();
  const int64_t na = game.pro_actions().joint_count();
  const int64_t nb = game.ant_actions().joint_count();
  if (na * nb > kMaxJointActions) throw InvalidArgument("joint action count exceeds the enumeration guard");
  const StateValues v = fq.Evaluate(params, s);
  std::vector<double> stage(na * nb);
  for (int64_t a = 0; a < na; ++a) {
    for (int64_t b = 0; b < nb; ++b) stage[a * nb + b] = fq.QTotJoint(v, a, b);
  }
  return MinMax(stage, na, nb);
}

double GreedyValue(const FactorizedQ& fq, std::span<const double> params,
                   const AugmentedState& s, bool cross_check) {
  const StateValues v = fq.Evaluate(params, s);
  const double value = fq.QTot(v, fq.Greedy(v));
  if (cross_check) {
    const double exact = ExhaustiveMinMax(fq, params, s).value;
    if (std::abs(exact - value) > 1e-9) {
      throw IgmmViolation("individual argmax value " + std::to_string(value) +
                          " differs from exhaustive min-max " + std::to_string(exact));
    }
  }
  return value;
}

double TdTarget(const FactorizedQ& fq, std::span<const double> target_params,
                const EpisodeStep& step, bool cross_check) {
  if (step.done) return step.reward;
  const double gamma = fq.game().gamma();
  if (gamma == 0.0) return step.reward;
  return step.reward + gamma * GreedyValue(fq, target_params, step.next, cross_check);
}

LossResult LossFromTargets(const FactorizedQ& fq, std::span<const double> params,
                           std::span<const EpisodeStep* const> batch,
                           std::span<const double> targets) {
  if (batch.empty()) throw InvalidArgument("loss over an empty batch");
  if (targets.size() != batch.size()) throw InvalidArgument("one target per batch entry");
  LossResult r;
  r.grad.assign(params.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  QTotTape tape;
  for (size_t k = 0; k < batch.size(); ++k) {
    const EpisodeStep& step = *batch[k];
    const double q = fq.Forward(params, step.state, step.action, &tape);
    const double diff = targets[k] - q;
    r.loss += diff * diff * scale;
    if (diff != 0.0) fq.Backward(tape, -2.0 * diff * scale, r.grad);
  }
  if (!std::isfinite(r.loss)) throw NonFiniteError("non-finite loss");
  return r;
}

LossResult Loss(const FactorizedQ& fq, std::span<const double> params,
                std::span<const double> target_params,
                std::span<const EpisodeStep* const> batch, bool cross_check) {
  std::vector<double> targets;
  targets.reserve(batch.size());
  for (const EpisodeStep* step : batch) {
    targets.push_back(TdTarget(fq, target_params, *step, cross_check));
  }
  return LossFromTargets(fq, params, batch, targets);
}

}  // namespace fm3q
