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

#include "commands.h"

#include <filesystem>
#include <functional>
#include <ostream>

#include "fm3q/baselines.h"
#include "fm3q/checkpoint.h"
#include "fm3q/coordinator.h"
#include "fm3q/errors.h"
#include "fm3q/eval.h"
#include "fm3q/game_io.h"
#include "fm3q/json_util.h"
#include "fm3q/learner.h"
#include "fm3q/oracle.h"
#include "fm3q/policy.h"
#include "run_config.h"

#ifndef FM3Q_VERSION
#define FM3Q_VERSION "unknown"
#endif

namespace fm3q::cli {

namespace {

namespace fs = std::filesystem;

int Guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InvalidArgument& e) {  // includes ConfigError
    err << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

nlohmann::json ReadConfig(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config", "a config file is required");
  return ReadJsonFile(o.config);
}

std::string OutDir(const Options& o, const std::string& from_config) {
  const std::string dir = o.out.empty() ? from_config : o.out;
  if (dir.empty()) throw ConfigError("config.out", "no output directory; pass --out or set out");
  fs::create_directories(dir);
  return dir;
}

// A game document, or a run config carrying one under "game".
GamePtr GameFromDocument(const nlohmann::json& doc) {
  if (doc.is_object() && doc.contains("game")) {
    nlohmann::json run = doc;
    if (!run.contains("episodes")) run["episodes"] = 0;
    for (const char* k : {"sizes", "seeds", "episodes_per_pair"}) run.erase(k);
    return RunConfig::FromJson(run).BuildGame();
  }
  return GameFromJson(doc, "game");
}

std::optional<double> FinalNashConv(const Game& game, GamePtr shared,
                                    const std::vector<Checkpoint>& checkpoints) {
  if (!game.enumerable() || checkpoints.empty()) return std::nullopt;
  const PolicyPair p = LoadPolicies(checkpoints.back(), shared);
  return NashConv(game, ToTeamTable(game, *p.pro), ToTeamTable(game, *p.ant)).nashconv;
}

nlohmann::json Provenance(uint64_t seed) {
  return {{"version", FM3Q_VERSION}, {"seed", seed}};
}

}  // namespace

int RunTrain(const Options& o, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    nlohmann::json doc = ReadConfig(o);
    if (o.seed && doc.is_object()) doc["seed"] = *o.seed;
    const RunConfig config = RunConfig::FromJson(doc);
    const std::string dir = OutDir(o, config.out);
    const GamePtr game = config.BuildGame();

    nlohmann::json echoed = config.ToJson();
    echoed.erase("out");
    WriteJsonFile(dir + "/config.json", echoed);

    const std::string ckpt_dir = dir + "/checkpoints";
    fs::create_directories(ckpt_dir);
    TrainHooks hooks;
    hooks.on_checkpoint = [&](const Checkpoint& c) {
      c.Save(ckpt_dir + "/" + CheckpointFileName(c));
    };

    std::vector<MetricsRow> metrics;
    std::vector<Checkpoint> checkpoints;
    int64_t total_steps = 0;
    bool rounds_consistent = true;
    if (config.method == "fm3q") {
      TrainResult r = Train(game, config.ToTrain(), hooks);
      metrics = std::move(r.metrics);
      checkpoints = std::move(r.checkpoints);
      total_steps = r.total_steps;
      rounds_consistent = Coordinator::LogConsistent(r.rounds, config.updates_per_round);
    } else if (config.method == "iql") {
      TrainResult r = TrainIndependent(game, config.ToIql(), hooks);
      metrics = std::move(r.metrics);
      checkpoints = std::move(r.checkpoints);
      total_steps = r.total_steps;
      rounds_consistent = Coordinator::LogConsistent(r.rounds, config.updates_per_round);
    } else {
      JointMinimaxResult r = TrainJointMinimax(game, config.ToJointMinimax(), hooks);
      metrics = std::move(r.metrics);
      checkpoints = std::move(r.checkpoints);
      total_steps = r.total_steps;
    }
    WriteTextFile(dir + "/metrics.csv", MetricsCsv(metrics));

    nlohmann::json summary = Provenance(config.seed);
    summary["method"] = config.method;
    summary["episodes"] = config.episodes;
    summary["total_steps"] = total_steps;
    summary["checkpoints"] = checkpoints.size();
    summary["rounds_consistent"] = rounds_consistent;
    const auto nc = FinalNashConv(*game, game, checkpoints);
    if (nc) summary["final_nashconv"] = *nc;
    WriteJsonFile(dir + "/summary.json", summary);

    out << config.method << ": " << config.episodes << " episodes, " << total_steps
        << " steps, " << checkpoints.size() << " checkpoints";
    if (nc) out << ", final nashconv " << FormatDouble(*nc);
    out << '\n';
    if (!rounds_consistent) {
      err << "error: coordinator log is inconsistent\n";
      return kExitRuntime;
    }
    return kExitOk;
  });
}

int RunOracle(const Options& o, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    if (!(o.tol > 0.0)) throw ConfigError("--tol", "must be positive");
    const GamePtr game = GameFromDocument(ReadConfig(o));
    const OracleSolution sol = SolveSuperbQ(*game, o.tol);
    if (!o.out.empty()) {
      fs::create_directories(o.out);
      WriteJsonFile(o.out + "/oracle.json", sol.ToJson());
    }
    out << "iterations " << sol.iterations << " residual " << FormatDouble(sol.residual)
        << " tol " << FormatDouble(o.tol) << " converged "
        << (sol.residual < o.tol ? "yes" : "no") << '\n';
    out << "saddle " << (sol.SaddleEverywhere() ? "yes" : "no") << '\n';
    for (int64_t s = 0; s < sol.num_states; ++s) {
      out << "V*[" << s << "] " << FormatDouble(sol.v_star[s]) << '\n';
    }
    return kExitOk;
  });
}

int RunEval(const Options& o, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const std::string& mode = o.mode;
    if (mode != "roundrobin" && mode != "nashconv" && mode != "trend" && mode != "vsbot") {
      throw ConfigError("--mode", "expected roundrobin, nashconv, trend or vsbot");
    }
    if (o.checkpoints.empty()) throw ConfigError("--checkpoints", "a directory is required");
    if (o.episodes_per_pair < 1) throw ConfigError("--episodes", "must be positive");
    const nlohmann::json game_doc = ReadConfig(o);
    const GamePtr game = GameFromDocument(game_doc);
    const std::string dir = OutDir(o, "");
    const uint64_t seed = o.seed.value_or(0);

    std::vector<std::string> warnings;
    const std::vector<Checkpoint> checkpoints = LoadCheckpointDir(o.checkpoints, &warnings);
    for (const auto& w : warnings) err << "warning: skipped " << w << '\n';
    if (checkpoints.empty()) {
      throw ConfigError("--checkpoints", "no checkpoints found in " + o.checkpoints);
    }
    const std::vector<CohortEntry> cohort = CohortFromCheckpoints(checkpoints, game, &warnings);

    EvalReport report;
    report.config = {{"mode", mode},
                     {"checkpoints", o.checkpoints},
                     {"game", game->ToJson()},
                     {"tol", o.tol},
                     {"episodes_per_pair", o.episodes_per_pair},
                     {"provenance", Provenance(seed)}};
    report.seeds = {seed};
    if (mode == "roundrobin" || mode == "trend") {
      if (cohort.size() < 2) {
        throw ConfigError("--checkpoints", mode + " needs at least two checkpoints");
      }
      PayoffTable t = RoundRobin(*game, cohort, o.episodes_per_pair, seed);
      report.scalars["zero_sum_violations"] = static_cast<double>(t.zero_sum_violations);
      if (mode == "trend") {
        const TrendResult trend = OptimizationTrend(t);
        report.trends["trend"] = trend;
        out << "trend: " << trend.later_wins << " later wins, " << trend.ties << " ties, "
            << trend.violations << " violations over " << trend.cells
            << " cells; fraction_positive " << FormatDouble(trend.fraction_positive)
            << " fraction_not_worse " << FormatDouble(trend.fraction_not_worse) << '\n';
      } else {
        for (size_t i = 0; i < t.size(); ++i) {
          out << t.names[i] << " rr " << FormatDouble(t.rr_return[i]) << " normalized "
              << FormatDouble(t.rr_normalized[i]) << '\n';
        }
      }
      report.tables[mode] = std::move(t);
    } else if (mode == "nashconv") {
      if (!game->enumerable()) throw ConfigError("--mode", "nashconv needs an enumerable game");
      Curve c = NashConvCurve(*game, cohort, o.tol);
      for (const auto& p : c.points) {
        out << "episode " << p.episode << " nashconv " << FormatDouble(p.value) << '\n';
      }
      report.curves["nashconv"] = std::move(c);
    } else {
      Curve c = VsBotCurve(game, cohort, o.episodes_per_pair, seed);
      for (const auto& p : c.points) {
        out << "episode " << p.episode << " vs_bot " << FormatDouble(p.value) << '\n';
      }
      report.curves["vsbot"] = std::move(c);
    }
    report.config["warnings"] = warnings;
    report.Write(dir);
    return kExitOk;
  });
}

int RunAblate(const Options& o, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    nlohmann::json doc = ReadConfig(o);
    if (o.seed && doc.is_object()) {
      doc["seed"] = *o.seed;
      doc["seeds"] = {*o.seed};
    }
    const AblateConfig config = AblateConfig::FromJson(doc);
    const std::string dir = OutDir(o, config.run.out);
    const GamePtr game = config.run.BuildGame();
    const AblationConfig resolved = config.Resolve(*game);

    nlohmann::json echoed = config.ToJson();
    echoed.erase("out");
    WriteJsonFile(dir + "/config.json", echoed);

    const AblationResult result = AblateBuffer(game, resolved);

    EvalReport report;
    report.config = echoed;
    report.config["resolved"] = resolved.ToJson();
    report.config["provenance"] = Provenance(config.run.seed);
    report.seeds = resolved.seeds;
    auto size_name = [](size_t x) { return x == 0 ? std::string("full") : std::to_string(x); };
    bool consistent = true;
    for (size_t k = 0; k < resolved.sizes.size(); ++k) {
      for (size_t s = 0; s < resolved.seeds.size(); ++s) {
        const AblationRun& run = result.runs[k][s];
        const std::string tag =
            size_name(resolved.sizes[k]) + "_seed" + std::to_string(resolved.seeds[s]);
        report.trends[tag] = run.trend;
        if (s < result.final_rr[k].size() && resolved.sizes.size() >= 2) {
          report.scalars["final_rr/" + tag] = result.final_rr[k][s];
        }
        consistent = consistent &&
                     Coordinator::LogConsistent(run.result.rounds, resolved.train.updates_per_round);
        const std::string run_dir = dir + "/runs/" + tag;
        fs::create_directories(run_dir);
        WriteTextFile(run_dir + "/metrics.csv", MetricsCsv(run.result.metrics));
      }
    }
    for (size_t s = 0; s < result.final_tables.size(); ++s) {
      report.tables["final_seed" + std::to_string(resolved.seeds[s])] = result.final_tables[s];
    }
    report.scalars["zero_sum_violations"] = static_cast<double>(result.zero_sum_violations);
    report.Write(dir);

    for (size_t k = 0; k < resolved.sizes.size(); ++k) {
      out << "size " << size_name(resolved.sizes[k]) << ':';
      for (size_t s = 0; s < resolved.seeds.size(); ++s) {
        out << " seed " << resolved.seeds[s] << " rr "
            << (resolved.sizes.size() >= 2 ? FormatDouble(result.final_rr[k][s]) : "n/a")
            << " trend " << FormatDouble(result.runs[k][s].trend.fraction_not_worse);
      }
      out << '\n';
    }
    if (!consistent) {
      err << "error: coordinator log is inconsistent\n";
      return kExitRuntime;
    }
    return kExitOk;
  });
}

}  // namespace fm3q::cli
