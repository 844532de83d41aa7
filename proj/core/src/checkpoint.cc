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

#include "fm3q/checkpoint.h"

#include <algorithm>
#include <filesystem>
#include <memory>
#include <sstream>
#include <iomanip>

#include "fm3q/baselines.h"
#include "fm3q/errors.h"
#include "fm3q/json_util.h"
#include "fm3q/policy.h"

namespace fm3q {

namespace {

// Keeps the game alive for as long as a policy refers to a model built on
// it.
struct ModelHolder {
  GamePtr game;
  FactorizedQ model;
};

std::shared_ptr<const FactorizedQ> BuildModel(GamePtr game, const FactorizedQSpec& spec) {
  auto holder = std::make_shared<ModelHolder>(ModelHolder{game, FactorizedQ(*game, spec)});
  return std::shared_ptr<const FactorizedQ>(holder, &holder->model);
}

}  // namespace

nlohmann::json Checkpoint::ToJson() const {
  return {{"version", kVersion},
          {"type", "checkpoint"},
          {"method", method},
          {"episode", episode},
          {"seed", seed},
          {"model", model}};
}

Checkpoint Checkpoint::FromJson(const nlohmann::json& doc) {
  const int version = RequireField<int>(doc, "version", "checkpoint");
  if (version != kVersion) {
    throw ConfigError("checkpoint.version", "unsupported version " + std::to_string(version));
  }
  Checkpoint c;
  c.method = RequireField<std::string>(doc, "method", "checkpoint");
  c.episode = RequireField<int64_t>(doc, "episode", "checkpoint");
  c.seed = OptionalField<uint64_t>(doc, "seed", "checkpoint", 0);
  if (!doc.contains("model")) throw ConfigError("checkpoint.model", "missing required field");
  c.model = doc.at("model");
  return c;
}

void Checkpoint::Save(const std::string& path) const { WriteJsonFile(path, ToJson()); }

Checkpoint Checkpoint::Load(const std::string& path) { return FromJson(ReadJsonFile(path)); }

PolicyPair LoadPolicies(const Checkpoint& c, GamePtr game) {
  if (c.method == "fm3q" || c.method == "iql") {
    if (!c.model.contains("spec")) throw ConfigError("checkpoint.model.spec", "missing required field");
    if (!c.model.contains("params")) {
      throw ConfigError("checkpoint.model.params", "missing required field");
    }
    const FactorizedQSpec spec = FactorizedQSpec::FromJson(c.model.at("spec"), "checkpoint.model.spec");
    const ParamVector params = ParamVector::FromJson(c.model.at("params"));
    auto model = BuildModel(game, spec);
    if (!(params.layout == model->layout())) {
      throw ConfigError("checkpoint.model.params.layout", "does not match the model topology");
    }
    return ExtractPolicies(model, params.values);
  }
  if (c.method == "jminimax") {
    JointMinimaxQ l = JointMinimaxQ::Zero(*game);
    if (!c.model.contains("q")) throw ConfigError("checkpoint.model.q", "missing required field");
    l.q = RequireField<std::vector<double>>(c.model.at("q"), "data", "checkpoint.model.q");
    if (l.q.size() != static_cast<size_t>(l.num_states * l.pro_joint * l.ant_joint)) {
      throw ConfigError("checkpoint.model.q.data", "size does not match the game");
    }
    return {std::make_shared<TablePolicy>(*game, Team::kPro, l.Policy(Team::kPro)),
            std::make_shared<TablePolicy>(*game, Team::kAnt, l.Policy(Team::kAnt))};
  }
  if (c.method == "table") {
    const auto pro = RequireField<TeamTable>(c.model, "pro", "checkpoint.model");
    const auto ant = RequireField<TeamTable>(c.model, "ant", "checkpoint.model");
    return {std::make_shared<TablePolicy>(*game, Team::kPro, pro),
            std::make_shared<TablePolicy>(*game, Team::kAnt, ant)};
  }
  throw ConfigError("checkpoint.method", "unknown method '" + c.method + "'");
}

Checkpoint TableCheckpoint(const std::vector<int64_t>& pro, const std::vector<int64_t>& ant,
                           int64_t episode) {
  Checkpoint c;
  c.method = "table";
  c.episode = episode;
  c.model = {{"pro", pro}, {"ant", ant}};
  return c;
}

std::string CheckpointFileName(const Checkpoint& c) {
  std::ostringstream name;
  name << "ckpt_" << c.method << '_' << std::setw(8) << std::setfill('0') << c.episode << ".json";
  return name.str();
}

std::vector<Checkpoint> LoadCheckpointDir(const std::string& dir,
                                          std::vector<std::string>* skipped) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, Checkpoint>> found;
  if (!fs::is_directory(dir)) throw InvalidArgument("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    try {
      const nlohmann::json doc = ReadJsonFile(p.string());
      if (!doc.is_object() || doc.value("type", "") != "checkpoint") continue;
      found.emplace_back(p.filename().string(), Checkpoint::FromJson(doc));
    } catch (const std::exception& e) {
      if (skipped) skipped->push_back(p.string() + ": " + e.what());
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    return x.second.episode < y.second.episode;
  });
  std::vector<Checkpoint> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

}  // namespace fm3q
