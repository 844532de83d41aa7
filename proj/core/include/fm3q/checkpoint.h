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

#ifndef FM3Q_CHECKPOINT_H_
#define FM3Q_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fm3q/game.h"
#include "json.hpp"

namespace fm3q {

struct PolicyPair;

// Self-describing snapshot of one learner. method is one of "fm3q", "iql",
// "jminimax" or "table"; model holds the method's topology header and flat
// parameters.
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::string method;
  int64_t episode = 0;
  uint64_t seed = 0;
  nlohmann::json model;

  nlohmann::json ToJson() const;
  // Throws ConfigError on a missing field or unsupported version.
  static Checkpoint FromJson(const nlohmann::json& doc);

  void Save(const std::string& path) const;
  static Checkpoint Load(const std::string& path);
};

// Rebuilds the greedy (epsilon = 0) policy pair stored in a checkpoint.
PolicyPair LoadPolicies(const Checkpoint& checkpoint, GamePtr game);

// Checkpoint of fixed policy tables, e.g. oracle or random policies.
Checkpoint TableCheckpoint(const std::vector<int64_t>& pro, const std::vector<int64_t>& ant,
                           int64_t episode = 0);

// "ckpt_<method>_<episode zero padded to 8>.json"
std::string CheckpointFileName(const Checkpoint& checkpoint);

// Loads every *.json checkpoint in a directory, sorted by (episode, file
// name). Files that fail to parse are skipped and reported in `skipped`.
std::vector<Checkpoint> LoadCheckpointDir(const std::string& dir,
                                          std::vector<std::string>* skipped = nullptr);

}  // namespace fm3q

#endif  // FM3Q_CHECKPOINT_H_
