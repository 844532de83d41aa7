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

#include "fm3q/baselines.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fm3q/errors.h"
#include "fm3q/json_util.h"
#include "fm3q/policy.h"

namespace fm3q {

namespace {

// Per-agent sampling streams start past the well-known stream ids.
constexpr uint64_t kAgentSamplingBase = 100;

int ArgMax(const std::vector<double>& q) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

}  // namespace

nlohmann::json IqlConfig::ToJson() const {
  return {{"episodes", episodes},
          {"lr", optimizer.lr},
          {"backend", backend == Backend::kNeural ? "neural" : "tabular"},
          {"hidden", hidden},
          {"window", window},
          {"buffer", {{"mode", BufferModeName(buffer_mode)}, {"capacity", buffer_capacity}}},
          {"updates_per_round", updates_per_round},
          {"epsilon",
           {{"start", epsilon.start},
            {"end", epsilon.end},
            {"decay_fraction", epsilon.decay_fraction}}},
          {"seed", seed},
          {"checkpoint_every", checkpoint_every},
          {"eval_every", eval_every}};
}

void IqlConfig::Validate(const std::string& path) const {
  if (episodes < 0) throw ConfigError(JoinPath(path, "episodes"), "must be non-negative");
  if (!(optimizer.lr > 0.0)) throw ConfigError(JoinPath(path, "lr"), "must be positive");
  if (updates_per_round < 1) {
    throw ConfigError(JoinPath(path, "updates_per_round"), "must be at least 1");
  }
  if (buffer_mode == BufferMode::kBounded && buffer_capacity == 0) {
    throw ConfigError(JoinPath(path, "buffer.capacity"), "bounded buffers need a capacity");
  }
  if (window < 1) throw ConfigError(JoinPath(path, "window"), "must be at least 1");
  epsilon.Validate(JoinPath(path, "epsilon"));
}

TrainResult TrainIndependent(GamePtr game, const IqlConfig& config, const TrainHooks& hooks) {
  config.Validate();
  FactorizedQSpec spec;
  spec.backend = config.backend;
  spec.hidden = config.hidden;
  spec.window = config.window;
  spec.mixer.kind = MixerKind::kAdditive;
  auto model = std::make_shared<const FactorizedQ>(*game, spec);
  const FactorizedQ& fq = *model;

  TrainResult result;
  result.model = model;
  Rng init = DeriveStream(config.seed, streams::kInit);
  Rng rollout = DeriveStream(config.seed, streams::kRollout);
  result.params = fq.InitialParams(init);
  result.target_params = result.params;
  if (config.episodes == 0) return result;

  struct Agent {
    Team team;
    int index;
    size_t begin;
    size_t end;
    Coordinator coordinator;
    AdamState adam;
  };
  std::vector<Agent> agents;
  for (Team team : {Team::kPro, Team::kAnt}) {
    for (int i = 0; i < fq.num_agents(team); ++i) {
      const auto [begin, end] = fq.AgentRange(team, i);
      const uint64_t id = kAgentSamplingBase + agents.size();
      agents.push_back({team, i, begin, end,
                        Coordinator(config.updates_per_round, DeriveStream(config.seed, id)),
                        AdamState(end - begin)});
    }
  }

  const bool eval_nashconv =
      config.eval_every > 0 && game->enumerable() && config.window == 1;
  ReplayBuffer buffer(config.buffer_mode, config.buffer_capacity);
  const double gamma = game->gamma();

  for (int64_t ep = 0; ep < config.episodes; ++ep) {
    MetricsRow row;
    row.episode = ep;
    row.epsilon = config.epsilon.At(ep, config.episodes);
    AugmentedState s = Reset(*game, rollout, config.window);
    double discount = 1.0;
    for (;;) {
      const JointAction action = SelectActions(fq, result.params, s, row.epsilon, rollout);
      EpisodeStep step = Step(*game, s, action, rollout);
      row.episode_return += discount * step.reward;
      discount *= gamma;
      ++row.steps;
      const bool done = step.done;
      s = step.next;
      buffer.Add(std::move(step));
      if (done) break;
    }
    result.total_steps += row.steps;

    double loss_sum = 0.0;
    int loss_terms = 0;
    std::vector<double> grad;
    AgentTape tape;
    for (Agent& agent : agents) {
      const RoundPlan plan = agent.coordinator.PlanRound(buffer.size());
      RoundRecord record;
      record.episode = ep;
      record.buffer_size = plan.buffer_size;
      record.batch_size = plan.batch_size;
      record.planned_updates = plan.updates;
      const double sign = agent.team == Team::kPro ? 1.0 : -1.0;
      std::unordered_map<StateId, double> value_cache;
      for (const auto& indices : plan.batches) {
        grad.assign(fq.num_params(), 0.0);
        double loss = 0.0;
        const double scale = 1.0 / static_cast<double>(indices.size());
        for (size_t idx : indices) {
          const EpisodeStep& step = buffer.at(idx);
          double target = sign * step.reward;
          if (!step.done && gamma != 0.0) {
            double next_value;
            auto it = config.window == 1 ? value_cache.find(step.next.state) : value_cache.end();
            if (it != value_cache.end()) {
              next_value = it->second;
            } else {
              const auto q = fq.AgentQ(result.target_params, step.next, agent.team, agent.index);
              next_value = q[ArgMax(q)];
              if (config.window == 1) value_cache.emplace(step.next.state, next_value);
            }
            target += gamma * next_value;
          }
          const int act = agent.team == Team::kPro ? step.action.pro[agent.index]
                                                   : step.action.ant[agent.index];
          const double q = fq.AgentValue(result.params, step.state, agent.team, agent.index,
                                         act, &tape);
          const double diff = target - q;
          loss += diff * diff * scale;
          if (diff != 0.0) fq.AgentBackward(tape, -2.0 * diff * scale, grad);
        }
        if (!std::isfinite(loss)) throw NonFiniteError("non-finite independent-Q loss");
        std::span<double> own(result.params.data() + agent.begin, agent.end - agent.begin);
        std::span<const double> own_grad(grad.data() + agent.begin, agent.end - agent.begin);
        AdamStep(own, own_grad, agent.adam, config.optimizer);
        loss_sum += loss;
        ++loss_terms;
        ++record.optimizer_steps;
      }
      std::copy(result.params.begin() + agent.begin, result.params.begin() + agent.end,
                result.target_params.begin() + agent.begin);
      record.target_synced = std::equal(result.params.begin() + agent.begin,
                                        result.params.begin() + agent.end,
                                        result.target_params.begin() + agent.begin);
      agent.coordinator.Record(record);
      if (&agent == &agents.front()) {
        row.buffer_size = plan.buffer_size;
        row.batch_size = plan.batch_size;
        row.updates = plan.updates;
      }
    }
    row.loss = loss_sum / std::max(1, loss_terms);
    if (eval_nashconv && (ep + 1) % config.eval_every == 0) {
      const PolicyPair pair = ExtractPolicies(model, result.params);
      row.nashconv =
          NashConv(*game, ToTeamTable(*game, *pair.pro), ToTeamTable(*game, *pair.ant)).nashconv;
    }
    result.metrics.push_back(row);
    if (hooks.on_metrics) hooks.on_metrics(row);

    const bool last = ep + 1 == config.episodes;
    if (last || (config.checkpoint_every > 0 && (ep + 1) % config.checkpoint_every == 0)) {
      Checkpoint c;
      c.method = "iql";
      c.episode = ep + 1;
      c.seed = config.seed;
      c.model = {{"spec", spec.ToJson()},
                 {"params", ParamVector{fq.layout(), result.params}.ToJson()}};
      result.checkpoints.push_back(c);
      if (hooks.on_checkpoint) hooks.on_checkpoint(c);
    }
  }
  for (const Agent& agent : agents) {
    const auto& log = agent.coordinator.log();
    result.rounds.insert(result.rounds.end(), log.begin(), log.end());
  }
  result.final_buffer_size = buffer.size();
  return result;
}

// ---------------------------------------------------------------------------

JointMinimaxQ JointMinimaxQ::Zero(const Game& game) {
  if (!game.enumerable()) throw InvalidArgument("joint minimax-Q needs an enumerable game");
  JointMinimaxQ l;
  l.num_states = game.num_states();
  l.pro_joint = game.pro_actions().joint_count();
  l.ant_joint = game.ant_actions().joint_count();
  if (l.pro_joint * l.ant_joint > kMaxJointActions) {
    throw InvalidArgument("joint action count exceeds the enumeration guard");
  }
  l.q.assign(static_cast<size_t>(l.num_states * l.pro_joint * l.ant_joint), 0.0);
  return l;
}

TeamTable JointMinimaxQ::Policy(Team team) const {
  TeamTable table(num_states);
  for (StateId s = 0; s < num_states; ++s) {
    table[s] = team == Team::kPro ? MaxMin(Stage(s), pro_joint, ant_joint).pro
                                  : MinMax(Stage(s), pro_joint, ant_joint).ant;
  }
  return table;
}

void JointMinimaxQUpdate(JointMinimaxQ& learner, const TabularTransition& t, double alpha,
                         double gamma) {
  const double target = t.done ? t.reward : t.reward + gamma * learner.Value(t.next);
  double& q = learner.at(t.state, t.pro, t.ant);
  q = (1.0 - alpha) * q + alpha * target;
}

void JointMinimaxQSweep(JointMinimaxQ& learner, const Dataset& data, double alpha,
                        double gamma) {
  for (const TabularTransition& t : data.items) JointMinimaxQUpdate(learner, t, alpha, gamma);
}

nlohmann::json JointMinimaxConfig::ToJson() const {
  return {{"episodes", episodes},
          {"alpha", alpha},
          {"epsilon",
           {{"start", epsilon.start},
            {"end", epsilon.end},
            {"decay_fraction", epsilon.decay_fraction}}},
          {"seed", seed},
          {"checkpoint_every", checkpoint_every},
          {"eval_every", eval_every}};
}

void JointMinimaxConfig::Validate(const std::string& path) const {
  if (episodes < 0) throw ConfigError(JoinPath(path, "episodes"), "must be non-negative");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError(JoinPath(path, "alpha"), "must lie in (0, 1]");
  epsilon.Validate(JoinPath(path, "epsilon"));
}

Checkpoint JointMinimaxCheckpoint(const JointMinimaxQ& learner, int64_t episode,
                                  uint64_t seed) {
  Checkpoint c;
  c.method = "jminimax";
  c.episode = episode;
  c.seed = seed;
  c.model = {{"q",
              {{"dims", {learner.num_states, learner.pro_joint, learner.ant_joint}},
               {"data", learner.q}}}};
  return c;
}

JointMinimaxResult TrainJointMinimax(GamePtr game, const JointMinimaxConfig& config,
                                     const TrainHooks& hooks) {
  config.Validate();
  JointMinimaxResult result;
  result.learner = JointMinimaxQ::Zero(*game);
  JointMinimaxQ& l = result.learner;
  Rng rollout = DeriveStream(config.seed, streams::kRollout);
  const ActionSpace& pa = game->pro_actions();
  const ActionSpace& aa = game->ant_actions();
  for (int64_t ep = 0; ep < config.episodes; ++ep) {
    MetricsRow row;
    row.episode = ep;
    row.epsilon = config.epsilon.At(ep, config.episodes);
    AugmentedState s = Reset(*game, rollout, 1);
    double discount = 1.0;
    double loss = 0.0;
    for (;;) {
      int64_t a = MaxMin(l.Stage(s.state), l.pro_joint, l.ant_joint).pro;
      int64_t b = MinMax(l.Stage(s.state), l.pro_joint, l.ant_joint).ant;
      if (Uniform01(rollout) < row.epsilon) a = UniformInt(rollout, static_cast<int>(l.pro_joint));
      if (Uniform01(rollout) < row.epsilon) b = UniformInt(rollout, static_cast<int>(l.ant_joint));
      const EpisodeStep step = Step(*game, s, {pa.Decode(a), aa.Decode(b)}, rollout);
      const TabularTransition t{s.state, a, b, step.reward, step.next.state,
                                game->IsTerminal(step.next.state)};
      const double before = l.at(t.state, a, b);
      JointMinimaxQUpdate(l, t, config.alpha, game->gamma());
      const double delta = (l.at(t.state, a, b) - before) / config.alpha;
      loss += delta * delta;
      row.episode_return += discount * step.reward;
      discount *= game->gamma();
      ++row.steps;
      s = step.next;
      if (step.done) break;
    }
    row.loss = loss / row.steps;
    result.total_steps += row.steps;
    if (config.eval_every > 0 && (ep + 1) % config.eval_every == 0) {
      row.nashconv = NashConv(*game, l.Policy(Team::kPro), l.Policy(Team::kAnt)).nashconv;
    }
    result.metrics.push_back(row);
    if (hooks.on_metrics) hooks.on_metrics(row);
    const bool last = ep + 1 == config.episodes;
    if (last || (config.checkpoint_every > 0 && (ep + 1) % config.checkpoint_every == 0)) {
      result.checkpoints.push_back(JointMinimaxCheckpoint(l, ep + 1, config.seed));
      if (hooks.on_checkpoint) hooks.on_checkpoint(result.checkpoints.back());
    }
  }
  return result;
}

}  // namespace fm3q
