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

#include "fm3q/learner.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_map>

#include "fm3q/errors.h"
#include "fm3q/json_util.h"
#include "fm3q/oracle.h"
#include "fm3q/policy.h"

namespace fm3q {

std::string FormatDouble(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double EpsilonSchedule::At(int64_t episode, int64_t total_episodes) const {
  const double horizon = decay_fraction * static_cast<double>(total_episodes);
  if (horizon <= 0.0) return end;
  const double frac = static_cast<double>(episode) / horizon;
  if (frac >= 1.0) return end;
  return start + (end - start) * frac;
}

void EpsilonSchedule::Validate(const std::string& path) const {
  if (!(end > 0.0)) {
    throw ConfigError(JoinPath(path, "end"),
                      "exploration must stay positive during data collection");
  }
  if (!(start >= end && start <= 1.0)) {
    throw ConfigError(JoinPath(path, "start"), "need end <= start <= 1");
  }
  if (!(decay_fraction >= 0.0 && decay_fraction <= 1.0)) {
    throw ConfigError(JoinPath(path, "decay_fraction"), "must lie in [0, 1]");
  }
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"episodes", episodes},
          {"lr", optimizer.lr},
          {"model", model.ToJson()},
          {"buffer", {{"mode", BufferModeName(buffer_mode)}, {"capacity", buffer_capacity}}},
          {"updates_per_round", updates_per_round},
          {"epsilon",
           {{"start", epsilon.start},
            {"end", epsilon.end},
            {"decay_fraction", epsilon.decay_fraction}}},
          {"seed", seed},
          {"checkpoint_every", checkpoint_every},
          {"eval_every", eval_every},
          {"td_cross_check", td_cross_check}};
}

void TrainConfig::Validate(const std::string& path) const {
  if (episodes < 0) throw ConfigError(JoinPath(path, "episodes"), "must be non-negative");
  if (!(optimizer.lr > 0.0)) throw ConfigError(JoinPath(path, "lr"), "must be positive");
  if (updates_per_round < 1) {
    throw ConfigError(JoinPath(path, "updates_per_round"), "must be at least 1");
  }
  if (buffer_mode == BufferMode::kBounded && buffer_capacity == 0) {
    throw ConfigError(JoinPath(path, "buffer.capacity"), "bounded buffers need a capacity");
  }
  if (checkpoint_every < 0) {
    throw ConfigError(JoinPath(path, "checkpoint_every"), "must be non-negative");
  }
  if (eval_every < 0) throw ConfigError(JoinPath(path, "eval_every"), "must be non-negative");
  epsilon.Validate(JoinPath(path, "epsilon"));
}

std::string MetricsCsv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "episode,loss,epsilon,buffer_size,batch_size,updates,steps,return,nashconv\n";
  for (const MetricsRow& r : rows) {
    out << r.episode << ',' << FormatDouble(r.loss) << ',' << FormatDouble(r.epsilon) << ','
        << r.buffer_size << ',' << r.batch_size << ',' << r.updates << ',' << r.steps << ','
        << FormatDouble(r.episode_return) << ',';
    if (r.nashconv) out << FormatDouble(*r.nashconv);
    out << '\n';
  }
  return out.str();
}

namespace {

Checkpoint MakeCheckpoint(const FactorizedQ& fq, const std::vector<double>& params,
                          int64_t episode, uint64_t seed) {
  Checkpoint c;
  c.method = "fm3q";
  c.episode = episode;
  c.seed = seed;
  ParamVector pv{fq.layout(), params};
  c.model = {{"spec", fq.spec().ToJson()}, {"params", pv.ToJson()}};
  return c;
}

double GreedyNashConv(const Game& game, std::shared_ptr<const FactorizedQ> model,
                      const std::vector<double>& params) {
  const PolicyPair pair = ExtractPolicies(std::move(model), params);
  return NashConv(game, ToTeamTable(game, *pair.pro), ToTeamTable(game, *pair.ant)).nashconv;
}

}  // namespace

TrainResult Train(GamePtr game, const TrainConfig& config, const TrainHooks& hooks) {
  config.Validate();
  TrainResult result;
  auto model = std::make_shared<const FactorizedQ>(*game, config.model);
  result.model = model;
  const FactorizedQ& fq = *model;
  Rng init = DeriveStream(config.seed, streams::kInit);
  Rng rollout = DeriveStream(config.seed, streams::kRollout);
  result.params = fq.InitialParams(init);
  result.target_params = result.params;
  if (config.episodes == 0) return result;

  const bool eval_nashconv = config.eval_every > 0 && game->enumerable() &&
                             config.model.window == 1;
  ReplayBuffer buffer(config.buffer_mode, config.buffer_capacity);
  Coordinator coordinator(config.updates_per_round, DeriveStream(config.seed, streams::kSampling));
  AdamState adam(fq.num_params());
  const int window = config.model.window;

  for (int64_t ep = 0; ep < config.episodes; ++ep) {
    MetricsRow row;
    row.episode = ep;
    row.epsilon = config.epsilon.At(ep, config.episodes);
    AugmentedState s = Reset(*game, rollout, window);
    double discount = 1.0;
    for (;;) {
      const JointAction action = SelectActions(fq, result.params, s, row.epsilon, rollout);
      EpisodeStep step = Step(*game, s, action, rollout);
      row.episode_return += discount * step.reward;
      discount *= game->gamma();
      ++row.steps;
      const bool done = step.done;
      s = step.next;
      buffer.Add(std::move(step));
      if (done) break;
    }
    result.total_steps += row.steps;

    const RoundPlan plan = coordinator.PlanRound(buffer.size());
    RoundRecord record;
    record.episode = ep;
    record.buffer_size = plan.buffer_size;
    record.batch_size = plan.batch_size;
    record.planned_updates = plan.updates;
    // Target values only depend on s' while the target snapshot is fixed,
    // so with window 1 they are cached per next state for the round.
    std::unordered_map<StateId, double> value_cache;
    double loss_sum = 0.0;
    std::vector<const EpisodeStep*> batch;
    std::vector<double> targets;
    for (const auto& indices : plan.batches) {
      batch.clear();
      targets.clear();
      for (size_t idx : indices) {
        const EpisodeStep& step = buffer.at(idx);
        batch.push_back(&step);
        if (step.done || game->gamma() == 0.0) {
          targets.push_back(step.reward);
        } else if (window == 1 && !config.td_cross_check) {
          auto it = value_cache.find(step.next.state);
          if (it == value_cache.end()) {
            it = value_cache
                     .emplace(step.next.state, GreedyValue(fq, result.target_params, step.next))
                     .first;
          }
          targets.push_back(step.reward + game->gamma() * it->second);
        } else {
          targets.push_back(TdTarget(fq, result.target_params, step, config.td_cross_check));
        }
      }
      LossResult lr = LossFromTargets(fq, result.params, batch, targets);
      AdamStep(result.params, lr.grad, adam, config.optimizer);
      loss_sum += lr.loss;
      ++record.optimizer_steps;
    }
    result.target_params = result.params;
    record.target_synced =
        std::memcmp(result.target_params.data(), result.params.data(),
                    result.params.size() * sizeof(double)) == 0;
    coordinator.Record(record);

    row.loss = loss_sum / static_cast<double>(plan.updates);
    row.buffer_size = plan.buffer_size;
    row.batch_size = plan.batch_size;
    row.updates = record.optimizer_steps;
    if (eval_nashconv && (ep + 1) % config.eval_every == 0) {
      row.nashconv = GreedyNashConv(*game, model, result.params);
    }
    result.metrics.push_back(row);
    if (hooks.on_metrics) hooks.on_metrics(row);

    const bool last = ep + 1 == config.episodes;
    if (last || (config.checkpoint_every > 0 && (ep + 1) % config.checkpoint_every == 0)) {
      result.checkpoints.push_back(MakeCheckpoint(fq, result.params, ep + 1, config.seed));
      if (hooks.on_checkpoint) hooks.on_checkpoint(result.checkpoints.back());
    }
  }
  result.rounds = coordinator.log();
  result.final_buffer_size = buffer.size();
  return result;
}

}  // namespace fm3q
