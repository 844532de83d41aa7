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

#include "fm3q/game_io.h"

#include <fstream>
#include <sstream>

#include "fm3q/errors.h"
#include "fm3q/grid_game.h"
#include "fm3q/json_util.h"
#include "fm3q/tabular_game.h"

namespace fm3q {

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

void WriteJsonFile(const std::string& path, const nlohmann::json& doc) {
  WriteTextFile(path, doc.dump(2) + "\n");
}

namespace {

std::vector<double> ReadTensor(const nlohmann::json& doc, const std::string& key,
                               const std::string& path,
                               const std::vector<int64_t>& expected_dims) {
  const std::string full = JoinPath(path, key);
  const nlohmann::json t = RequireField<nlohmann::json>(doc, key, path);
  const auto dims = RequireField<std::vector<int64_t>>(t, "dims", full);
  if (dims != expected_dims) {
    throw ConfigError(full + ".dims", "dimensions do not match the declared game");
  }
  auto data = RequireField<std::vector<double>>(t, "data", full);
  int64_t total = 1;
  for (int64_t d : dims) total *= d;
  if (static_cast<int64_t>(data.size()) != total) {
    throw ConfigError(full + ".data", "expected " + std::to_string(total) + " entries");
  }
  return data;
}

int64_t JointCount(const std::vector<int>& counts) {
  int64_t c = 1;
  for (int x : counts) c *= x;
  return c;
}

template <typename Fn>
GamePtr Wrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

GamePtr GameFromJson(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError(path, "expected an object");
  const auto type = RequireField<std::string>(doc, "type", path);
  if (type == "tabular") {
    return Wrap(path, [&]() -> GamePtr {
      const auto num_states = RequireField<int64_t>(doc, "num_states", path);
      const auto pro = RequireField<std::vector<int>>(doc, "pro_actions", path);
      const auto ant = RequireField<std::vector<int>>(doc, "ant_actions", path);
      const auto gamma = RequireField<double>(doc, "gamma", path);
      const int horizon = OptionalField<int>(doc, "horizon", path, DefaultHorizon(gamma));
      const int64_t na = JointCount(pro), nb = JointCount(ant);
      auto transitions = ReadTensor(doc, "transitions", path, {num_states, na, nb, num_states});
      auto rewards = ReadTensor(doc, "rewards", path, {num_states, na, nb});
      auto initial = OptionalField<std::vector<double>>(doc, "initial", path, {});
      auto label = OptionalField<std::string>(doc, "label", path, "tabular");
      return std::make_shared<TabularGame>(pro, ant, num_states, std::move(transitions),
                                           std::move(rewards), gamma, horizon,
                                           std::move(initial), std::move(label));
    });
  }
  if (type == "random") {
    return Wrap(path, [&]() -> GamePtr {
      RandomGameOptions o;
      o.seed = RequireField<uint64_t>(doc, "seed", path);
      o.num_states = RequireField<int64_t>(doc, "num_states", path);
      o.num_pro = RequireField<int>(doc, "n", path);
      o.num_ant = RequireField<int>(doc, "m", path);
      o.actions_per_agent = RequireField<int>(doc, "actions", path);
      o.gamma = RequireField<double>(doc, "gamma", path);
      o.horizon = OptionalField<int>(doc, "horizon", path, 0);
      o.deterministic = OptionalField<bool>(doc, "deterministic", path, false);
      return std::make_shared<TabularGame>(RandomTabularGame(o));
    });
  }
  if (type == "matrix") {
    return Wrap(path, [&]() -> GamePtr {
      const auto pro = RequireField<std::vector<int>>(doc, "pro_actions", path);
      const auto ant = RequireField<std::vector<int>>(doc, "ant_actions", path);
      auto payoff = ReadTensor(doc, "payoff", path, {JointCount(pro), JointCount(ant)});
      return std::make_shared<TabularGame>(MatrixTeamGame(payoff, pro, ant));
    });
  }
  if (type == "grid") {
    return Wrap(path, [&]() -> GamePtr {
      GridConfig c = GridConfig::ForSide(RequireField<int>(doc, "side", path));
      c.horizon = OptionalField<int>(doc, "horizon", path, c.horizon);
      c.gamma = OptionalField<double>(doc, "gamma", path, c.gamma);
      c.observation_radius =
          OptionalField<int>(doc, "observation_radius", path, c.observation_radius);
      if (doc.contains("target")) {
        const auto t = RequireField<std::vector<int>>(doc, "target", path);
        if (t.size() != 2) throw ConfigError(JoinPath(path, "target"), "expected [x, y]");
        c.target = {t[0], t[1]};
      }
      if (doc.contains("start")) {
        const auto s = RequireField<std::vector<std::vector<int>>>(doc, "start", path);
        if (s.size() != 4) throw ConfigError(JoinPath(path, "start"), "expected 4 positions");
        for (int k = 0; k < 4; ++k) {
          if (s[k].size() != 2) {
            throw ConfigError(JoinPath(path, "start"), "expected [x, y] pairs");
          }
          c.start[k] = {s[k][0], s[k][1]};
        }
      }
      return std::make_shared<GridKeepawayGame>(c);
    });
  }
  if (type == "saddle") {
    return Wrap(path, [&]() -> GamePtr {
      return std::make_shared<TabularGame>(SaddleBenchmarkGame());
    });
  }
  throw ConfigError(JoinPath(path, "type"), "unknown game type '" + type + "'");
}

GamePtr LoadGame(const std::string& file) {
  return GameFromJson(ReadJsonFile(file), "game");
}

}  // namespace fm3q
