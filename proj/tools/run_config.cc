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

#include "run_config.h"

#include <cmath>
#include <set>

#include "fm3q/errors.h"
#include "fm3q/game_io.h"
#include "fm3q/json_util.h"
#include "fm3q/replay_buffer.h"

namespace fm3q::cli {

namespace {

const std::set<std::string> kRunKeys = {
    "game",          "method",        "episodes",   "gamma",        "lr",
    "hidden",        "mix_hidden",    "backend",    "window",       "buffer_mode",
    "buffer_capacity", "updates_per_round", "epsilon", "seed",       "checkpoint_every",
    "eval_every",    "alpha",         "out"};

const std::set<std::string> kAblateKeys = {"sizes", "seeds", "episodes_per_pair"};

// Game types whose document carries its own discount.
bool TakesGamma(const std::string& type) {
  return type == "tabular" || type == "random" || type == "grid";
}

void RejectUnknown(const nlohmann::json& doc, const std::string& path,
                   const std::set<std::string>& a, const std::set<std::string>& b = {}) {
  for (const auto& [key, value] : doc.items()) {
    if (!a.count(key) && !b.count(key)) throw ConfigError(JoinPath(path, key), "unknown field");
  }
}

}  // namespace

RunConfig RunConfig::FromJson(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError(path, "expected an object");
  RejectUnknown(doc, path, kRunKeys);
  RunConfig c;
  c.game = RequireField<nlohmann::json>(doc, "game", path);
  if (!c.game.is_object()) throw ConfigError(JoinPath(path, "game"), "expected an object");
  c.method = OptionalField<std::string>(doc, "method", path, c.method);
  if (c.method != "fm3q" && c.method != "iql" && c.method != "jminimax") {
    throw ConfigError(JoinPath(path, "method"), "expected fm3q, iql or jminimax");
  }
  c.episodes = RequireField<int64_t>(doc, "episodes", path);
  if (doc.contains("gamma")) c.gamma = RequireField<double>(doc, "gamma", path);
  c.lr = OptionalField<double>(doc, "lr", path, c.lr);
  c.hidden = OptionalField<std::vector<int>>(doc, "hidden", path, c.hidden);
  c.mix_hidden = OptionalField<int>(doc, "mix_hidden", path, c.mix_hidden);
  c.backend = OptionalField<std::string>(doc, "backend", path, c.backend);
  if (c.backend != "neural" && c.backend != "tabular") {
    throw ConfigError(JoinPath(path, "backend"), "expected neural or tabular");
  }
  c.window = OptionalField<int>(doc, "window", path, c.window);
  if (doc.contains("buffer_mode")) {
    const auto name = RequireField<std::string>(doc, "buffer_mode", path);
    try {
      c.buffer_mode = BufferModeFromName(name);
    } catch (const InvalidArgument& e) {
      throw ConfigError(JoinPath(path, "buffer_mode"), e.what());
    }
  }
  c.buffer_capacity = OptionalField<size_t>(doc, "buffer_capacity", path, c.buffer_capacity);
  c.updates_per_round = OptionalField<int>(doc, "updates_per_round", path, c.updates_per_round);
  if (doc.contains("epsilon")) {
    const auto& e = doc.at("epsilon");
    const std::string ep = JoinPath(path, "epsilon");
    if (!e.is_object()) throw ConfigError(ep, "expected an object");
    RejectUnknown(e, ep, {"start", "end", "decay_fraction"});
    c.epsilon.start = OptionalField<double>(e, "start", ep, c.epsilon.start);
    c.epsilon.end = OptionalField<double>(e, "end", ep, c.epsilon.end);
    c.epsilon.decay_fraction =
        OptionalField<double>(e, "decay_fraction", ep, c.epsilon.decay_fraction);
  }
  c.seed = OptionalField<uint64_t>(doc, "seed", path, c.seed);
  c.checkpoint_every = OptionalField<int64_t>(doc, "checkpoint_every", path, c.checkpoint_every);
  c.eval_every = OptionalField<int64_t>(doc, "eval_every", path, c.eval_every);
  c.alpha = OptionalField<double>(doc, "alpha", path, c.alpha);
  c.out = OptionalField<std::string>(doc, "out", path, c.out);
  if (c.gamma && !(*c.gamma >= 0.0 && *c.gamma < 1.0)) {
    throw ConfigError(JoinPath(path, "gamma"), "must lie in [0, 1)");
  }
  // Method-specific checks run on the translated configs so that the error
  // paths match the run config's own field names.
  if (c.method == "fm3q") {
    c.ToTrain().Validate(path);
  } else if (c.method == "iql") {
    c.ToIql().Validate(path);
  } else {
    c.ToJointMinimax().Validate(path);
  }
  return c;
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json j = {
      {"game", ResolvedGame()},
      {"method", method},
      {"episodes", episodes},
      {"lr", lr},
      {"hidden", hidden},
      {"mix_hidden", mix_hidden},
      {"backend", backend},
      {"window", window},
      {"buffer_mode", BufferModeName(buffer_mode)},
      {"buffer_capacity", buffer_capacity},
      {"updates_per_round", updates_per_round},
      {"epsilon",
       {{"start", epsilon.start}, {"end", epsilon.end}, {"decay_fraction", epsilon.decay_fraction}}},
      {"seed", seed},
      {"checkpoint_every", checkpoint_every},
      {"eval_every", eval_every},
      {"alpha", alpha},
  };
  j["gamma"] = BuildGame()->gamma();
  if (!out.empty()) j["out"] = out;
  return j;
}

nlohmann::json RunConfig::ResolvedGame() const {
  nlohmann::json g = game;
  const std::string type = g.value("type", "");
  if (TakesGamma(type) && !g.contains("gamma")) g["gamma"] = gamma.value_or(kDefaultGamma);
  return g;
}

GamePtr RunConfig::BuildGame() const {
  nlohmann::json g = ResolvedGame();
  GamePtr built = GameFromJson(g, "config.game");
  if (gamma && std::abs(built->gamma() - *gamma) > 0.0) {
    throw ConfigError("config.gamma", "conflicts with the game's discount " +
                                          FormatDouble(built->gamma()));
  }
  return built;
}

TrainConfig RunConfig::ToTrain() const {
  TrainConfig t;
  t.episodes = episodes;
  t.optimizer.lr = lr;
  t.model.backend = backend == "tabular" ? Backend::kTabular : Backend::kNeural;
  t.model.hidden = hidden;
  t.model.mixer.hidden = mix_hidden;
  t.model.window = window;
  t.buffer_mode = buffer_mode;
  t.buffer_capacity = buffer_capacity;
  t.updates_per_round = updates_per_round;
  t.epsilon = epsilon;
  t.seed = seed;
  t.checkpoint_every = checkpoint_every;
  t.eval_every = eval_every;
  return t;
}

IqlConfig RunConfig::ToIql() const {
  IqlConfig t;
  t.episodes = episodes;
  t.optimizer.lr = lr;
  t.backend = backend == "tabular" ? Backend::kTabular : Backend::kNeural;
  t.hidden = hidden;
  t.window = window;
  t.buffer_mode = buffer_mode;
  t.buffer_capacity = buffer_capacity;
  t.updates_per_round = updates_per_round;
  t.epsilon = epsilon;
  t.seed = seed;
  t.checkpoint_every = checkpoint_every;
  t.eval_every = eval_every;
  return t;
}

JointMinimaxConfig RunConfig::ToJointMinimax() const {
  JointMinimaxConfig t;
  t.episodes = episodes;
  t.alpha = alpha;
  t.epsilon = epsilon;
  t.seed = seed;
  t.checkpoint_every = checkpoint_every;
  t.eval_every = eval_every;
  return t;
}

AblateConfig AblateConfig::FromJson(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError(path, "expected an object");
  RejectUnknown(doc, path, kRunKeys, kAblateKeys);
  nlohmann::json run = doc;
  for (const auto& k : kAblateKeys) run.erase(k);
  AblateConfig c;
  c.run = RunConfig::FromJson(run, path);
  if (c.run.method != "fm3q") {
    throw ConfigError(JoinPath(path, "method"), "buffer ablation trains fm3q only");
  }
  c.sizes = RequireField<nlohmann::json>(doc, "sizes", path);
  if (!c.sizes.is_array() || c.sizes.empty()) {
    throw ConfigError(JoinPath(path, "sizes"), "expected a non-empty array");
  }
  c.seeds = OptionalField<std::vector<uint64_t>>(doc, "seeds", path, {c.run.seed});
  c.episodes_per_pair = OptionalField<int64_t>(doc, "episodes_per_pair", path, 1);
  // Catch malformed sizes and ordering before any training starts.
  c.Resolve(*c.run.BuildGame()).Validate(path);
  return c;
}

nlohmann::json AblateConfig::ToJson() const {
  nlohmann::json j = run.ToJson();
  j["sizes"] = sizes;
  j["seeds"] = seeds;
  j["episodes_per_pair"] = episodes_per_pair;
  return j;
}

AblationConfig AblateConfig::Resolve(const Game& game) const {
  AblationConfig a;
  a.train = run.ToTrain();
  a.seeds = seeds;
  a.episodes_per_pair = episodes_per_pair;
  const double total_steps = static_cast<double>(run.episodes) * game.horizon();
  for (size_t k = 0; k < sizes.size(); ++k) {
    const std::string p = "config.sizes[" + std::to_string(k) + "]";
    const auto& s = sizes[k];
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<int64_t>() > 0)) {
      const auto v = s.get<int64_t>();
      if (v <= 0) throw ConfigError(p, "must be positive");
      a.sizes.push_back(static_cast<size_t>(v));
    } else if (s.is_string() && s.get<std::string>() == "full") {
      a.sizes.push_back(0);
    } else if (s.is_string() && !s.get<std::string>().empty() &&
               s.get<std::string>().back() == '%') {
      const std::string text = s.get<std::string>();
      double pct = 0.0;
      try {
        size_t used = 0;
        pct = std::stod(text.substr(0, text.size() - 1), &used);
        if (used != text.size() - 1) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        throw ConfigError(p, "malformed percentage '" + text + "'");
      }
      if (!(pct > 0.0 && pct <= 100.0)) throw ConfigError(p, "percentage must lie in (0, 100]");
      a.sizes.push_back(static_cast<size_t>(std::max(1.0, std::floor(total_steps * pct / 100.0))));
    } else {
      throw ConfigError(p, "expected a positive integer, \"full\" or \"<p>%\"");
    }
  }
  return a;
}

}  // namespace fm3q::cli
