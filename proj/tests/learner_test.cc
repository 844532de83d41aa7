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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <vector>

#include "fm3q/checkpoint.h"
#include "fm3q/errors.h"
#include "fm3q/learner.h"
#include "fm3q/oracle.h"
#include "fm3q/policy.h"
#include "fm3q/tabular_game.h"
#include "gtest/gtest.h"

namespace fm3q {
namespace {

// Pro action 0 strictly dominates; Ant's best reply to it is action 0.
GamePtr DominantGame() {
  return std::make_shared<TabularGame>(MatrixTeamGame({1, 2, -1, 0}, {2}, {2}));
}

GamePtr RandomGame(uint64_t seed) {
  RandomGameOptions o;
  o.seed = seed;
  o.num_states = 3;
  o.num_pro = 2;
  o.num_ant = 2;
  o.actions_per_agent = 2;
  o.gamma = 0.5;
  o.deterministic = true;
  return std::make_shared<TabularGame>(RandomTabularGame(o));
}

TrainConfig SmallConfig(int64_t episodes) {
  TrainConfig c;
  c.episodes = episodes;
  c.model.hidden = {8};
  c.model.mixer.hidden = 4;
  c.optimizer.lr = 0.01;
  return c;
}

TEST(EpsilonScheduleTest, LinearDecayThenConstant) {
  const EpsilonSchedule e;
  EXPECT_EQ(e.At(0, 100), 1.0);
  EXPECT_DOUBLE_EQ(e.At(10, 100), 0.525);
  EXPECT_DOUBLE_EQ(e.At(20, 100), 0.05);
  EXPECT_DOUBLE_EQ(e.At(99, 100), 0.05);
  const EpsilonSchedule flat{0.3, 0.3, 0.0};
  EXPECT_EQ(flat.At(0, 10), 0.3);
}

TEST(EpsilonScheduleTest, ZeroExplorationIsRefused) {
  TrainConfig c = SmallConfig(10);
  c.epsilon.end = 0.0;
  try {
    c.Validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "train.epsilon.end");
  }
  c.epsilon = {0.5, 0.6, 0.2};
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(TrainConfigTest, DefaultHyperparameters) {
  const TrainConfig c;
  EXPECT_EQ(c.optimizer.lr, 5e-4);
  EXPECT_EQ(c.model.hidden, (std::vector<int>{64, 64}));
  EXPECT_EQ(c.model.mixer.hidden, 32);
  EXPECT_EQ(c.buffer_mode, BufferMode::kFull);
}

TEST(TrainTest, ZeroEpisodesReturnsTheInitialModel) {
  const GamePtr g = RandomGame(1);
  const TrainResult r = Train(g, SmallConfig(0));
  EXPECT_TRUE(r.metrics.empty());
  EXPECT_TRUE(r.checkpoints.empty());
  EXPECT_EQ(r.total_steps, 0);
  Rng init = DeriveStream(0, streams::kInit);
  EXPECT_EQ(r.params, r.model->InitialParams(init));
}

TEST(TrainTest, OneEpisodeOnAMatrixGame) {
  const GamePtr g = DominantGame();
  TrainConfig c = SmallConfig(1);
  int calls = 0;
  TrainHooks hooks;
  hooks.on_metrics = [&](const MetricsRow&) { ++calls; };
  const TrainResult r = Train(g, c, hooks);
  ASSERT_EQ(r.metrics.size(), 1u);
  EXPECT_EQ(calls, 1);
  const MetricsRow& row = r.metrics[0];
  EXPECT_EQ(row.steps, 1);
  EXPECT_EQ(row.buffer_size, 1u);
  EXPECT_EQ(row.batch_size, 1u);
  EXPECT_EQ(row.updates, 10);
  EXPECT_EQ(row.epsilon, 1.0);
  ASSERT_EQ(r.checkpoints.size(), 1u);
  EXPECT_EQ(r.checkpoints[0].episode, 1);
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_TRUE(Coordinator::LogConsistent(r.rounds, 10));
  EXPECT_EQ(r.params, r.target_params);
}

TEST(TrainTest, RoundsFollowTheBatchRule) {
  const GamePtr g = RandomGame(2);
  TrainConfig c = SmallConfig(12);
  c.updates_per_round = 4;
  c.checkpoint_every = 5;
  const TrainResult r = Train(g, c);
  EXPECT_TRUE(Coordinator::LogConsistent(r.rounds, 4));
  const int64_t h = g->horizon();
  for (size_t k = 0; k < r.rounds.size(); ++k) {
    EXPECT_EQ(r.rounds[k].buffer_size, static_cast<size_t>((k + 1) * h));
  }
  EXPECT_EQ(r.total_steps, 12 * h);
  // Periodic checkpoints plus the final one.
  ASSERT_EQ(r.checkpoints.size(), 3u);
  EXPECT_EQ(r.checkpoints[0].episode, 5);
  EXPECT_EQ(r.checkpoints[1].episode, 10);
  EXPECT_EQ(r.checkpoints[2].episode, 12);
}

TEST(TrainTest, BoundedBufferEvicts) {
  const GamePtr g = RandomGame(3);
  TrainConfig c = SmallConfig(8);
  c.buffer_mode = BufferMode::kBounded;
  c.buffer_capacity = 15;
  const TrainResult r = Train(g, c);
  EXPECT_EQ(r.final_buffer_size, 15u);
  EXPECT_TRUE(Coordinator::LogConsistent(r.rounds, c.updates_per_round));
}

TEST(TrainTest, SameSeedIsBitIdentical) {
  const GamePtr g = RandomGame(4);
  TrainConfig c = SmallConfig(6);
  c.seed = 17;
  c.eval_every = 2;
  const TrainResult a = Train(g, c);
  const TrainResult b = Train(g, c);
  EXPECT_EQ(MetricsCsv(a.metrics), MetricsCsv(b.metrics));
  ASSERT_EQ(a.params.size(), b.params.size());
  EXPECT_EQ(std::memcmp(a.params.data(), b.params.data(), a.params.size() * sizeof(double)), 0);
  EXPECT_TRUE(a.metrics[1].nashconv.has_value());
  EXPECT_FALSE(a.metrics[0].nashconv.has_value());
  c.seed = 18;
  EXPECT_NE(MetricsCsv(Train(g, c).metrics), MetricsCsv(a.metrics));
}

TEST(TrainTest, CrossCheckedTargetsAgree) {
  const GamePtr g = RandomGame(5);
  TrainConfig c = SmallConfig(5);
  c.td_cross_check = true;
  const TrainResult checked = Train(g, c);
  c.td_cross_check = false;
  const TrainResult fast = Train(g, c);
  // The shortcut and the exhaustive target are equal, so the runs coincide.
  EXPECT_EQ(MetricsCsv(checked.metrics), MetricsCsv(fast.metrics));
}

TEST(TrainTest, LearnsTheDominantAction) {
  const GamePtr g = DominantGame();
  TrainConfig c = SmallConfig(150);
  c.seed = 3;
  const TrainResult r = Train(g, c);
  const PolicyPair p = ExtractPolicies(r.model, r.params);
  const TeamTable pro = ToTeamTable(*g, *p.pro);
  const TeamTable ant = ToTeamTable(*g, *p.ant);
  EXPECT_EQ(pro[0], 0);
  EXPECT_EQ(ant[0], 0);
  EXPECT_EQ(NashConv(*g, pro, ant).nashconv, 0.0);
}

TEST(CheckpointTest, RoundTripPreservesPolicies) {
  const GamePtr g = RandomGame(6);
  const TrainResult r = Train(g, SmallConfig(3));
  const Checkpoint& ck = r.checkpoints.back();
  const Checkpoint back = Checkpoint::FromJson(nlohmann::json::parse(ck.ToJson().dump()));
  EXPECT_EQ(back.method, "fm3q");
  EXPECT_EQ(back.episode, 3);
  const PolicyPair a = ExtractPolicies(r.model, r.params);
  const PolicyPair b = LoadPolicies(back, g);
  EXPECT_EQ(ToTeamTable(*g, *a.pro), ToTeamTable(*g, *b.pro));
  EXPECT_EQ(ToTeamTable(*g, *a.ant), ToTeamTable(*g, *b.ant));

  const auto dir = std::filesystem::temp_directory_path() / "fm3q_ckpt_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  for (const Checkpoint& c : r.checkpoints) c.Save((dir / CheckpointFileName(c)).string());
  {
    std::ofstream junk(dir / "junk.json");
    junk << "{not json";
  }
  std::vector<std::string> skipped;
  const std::vector<Checkpoint> loaded = LoadCheckpointDir(dir.string(), &skipped);
  ASSERT_EQ(loaded.size(), r.checkpoints.size());
  EXPECT_EQ(skipped.size(), 1u);
  EXPECT_EQ(CheckpointFileName(ck), "ckpt_fm3q_00000003.json");
  std::filesystem::remove_all(dir);
}

TEST(CheckpointTest, RejectsUnknownVersionAndMissingFields) {
  nlohmann::json doc = TableCheckpoint({0}, {1}).ToJson();
  doc["version"] = 99;
  EXPECT_THROW(Checkpoint::FromJson(doc), ConfigError);
  doc = TableCheckpoint({0}, {1}).ToJson();
  doc.erase("method");
  EXPECT_THROW(Checkpoint::FromJson(doc), ConfigError);
}

TEST(CheckpointTest, TableCheckpointPlaysItsTable) {
  const GamePtr g = RandomGame(7);
  const Checkpoint ck = TableCheckpoint({3, 0, 2}, {1, 1, 0}, 42);
  const PolicyPair p = LoadPolicies(ck, g);
  EXPECT_EQ(ToTeamTable(*g, *p.pro), (TeamTable{3, 0, 2}));
  EXPECT_EQ(ToTeamTable(*g, *p.ant), (TeamTable{1, 1, 0}));
}

}  // namespace
}  // namespace fm3q
