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

#include "fm3q/eval.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "fm3q/errors.h"
#include "fm3q/json_util.h"
#include "fm3q/oracle.h"

namespace fm3q {

namespace {

int MatchWindow(const TeamPolicy& pro, const TeamPolicy& ant) {
  const int a = pro.window();
  const int b = ant.window();
  if (a > 0 && b > 0 && a != b) {
    throw InvalidArgument("policies read different history windows");
  }
  return std::max({1, a, b});
}

struct EpisodeReturns {
  double pro = 0.0;
  double ant = 0.0;
};

EpisodeReturns RunEpisode(const Game& game, AugmentedState s, const TeamPolicy& pro,
                          const TeamPolicy& ant, Rng& rng) {
  EpisodeReturns ret;
  double discount = 1.0;
  for (;;) {
    const EpisodeStep step = Step(game, s, {pro.Act(s), ant.Act(s)}, rng);
    ret.pro += discount * step.reward;
    ret.ant += discount * -step.reward;
    discount *= game.gamma();
    if (step.done) break;
    s = step.next;
  }
  return ret;
}

std::string CsvMatrix(const std::vector<std::string>& names, const std::vector<double>& cells) {
  std::ostringstream out;
  out << "name";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  const size_t n = names.size();
  for (size_t i = 0; i < n; ++i) {
    out << names[i];
    for (size_t j = 0; j < n; ++j) out << ',' << FormatDouble(cells[i * n + j]);
    out << '\n';
  }
  return out.str();
}

}  // namespace

MatchResult PlayMatch(const Game& game, const TeamPolicy& pro, const TeamPolicy& ant,
                      int64_t episodes, Rng& rng) {
  if (pro.team() != Team::kPro || ant.team() != Team::kAnt) {
    throw InvalidArgument("PlayMatch needs a Pro policy and an Ant policy");
  }
  const int window = MatchWindow(pro, ant);
  MatchResult r;
  auto tally = [&](const EpisodeReturns& ret, double weight) {
    r.mean_return += weight * ret.pro;
    r.ant_mean_return += weight * ret.ant;
    if (ret.pro > 0.0) {
      r.win_rate += weight;
    } else if (ret.pro == 0.0) {
      r.draw_rate += weight;
    } else {
      r.loss_rate += weight;
    }
    if (ret.pro + ret.ant != 0.0) ++r.zero_sum_violations;
  };
  if (game.deterministic()) {
    r.exact = true;
    for (const Outcome& o : game.InitialDistribution()) {
      if (o.prob <= 0.0) continue;
      tally(RunEpisode(game, MakeAugmented(game, o.next, window), pro, ant, rng), o.prob);
      ++r.episodes;
    }
    return r;
  }
  if (episodes < 1) throw InvalidArgument("a sampled match needs at least one episode");
  std::vector<double> returns;
  for (int64_t e = 0; e < episodes; ++e) {
    const EpisodeReturns ret = RunEpisode(game, Reset(game, rng, window), pro, ant, rng);
    tally(ret, 1.0 / static_cast<double>(episodes));
    returns.push_back(ret.pro);
  }
  r.episodes = episodes;
  if (episodes > 1) {
    double var = 0.0;
    for (double x : returns) var += (x - r.mean_return) * (x - r.mean_return);
    var /= static_cast<double>(episodes - 1);
    r.half_width = 1.96 * std::sqrt(var / static_cast<double>(episodes));
  }
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json PayoffTable::ToJson() const {
  const size_t n = names.size();
  return {{"names", names},
          {"episodes", episodes},
          {"cells", {{"dims", {n, n}}, {"data", cells}}},
          {"matches", {{"dims", {n, n}}, {"data", matches}}},
          {"half_widths", {{"dims", {n, n}}, {"data", half_widths}}},
          {"rr_return", rr_return},
          {"rr_normalized", rr_normalized},
          {"zero_sum_violations", zero_sum_violations},
          {"warnings", warnings}};
}

std::string PayoffTable::CellsCsv() const { return CsvMatrix(names, cells); }

PayoffTable RoundRobin(const Game& game, const std::vector<CohortEntry>& entries,
                       int64_t episodes_per_pair, uint64_t seed) {
  const size_t n = entries.size();
  if (n < 2) throw InvalidArgument("a round robin needs at least two contestants");
  PayoffTable t;
  for (const CohortEntry& e : entries) {
    t.names.push_back(e.name);
    t.episodes.push_back(e.episode);
  }
  // ret[i][j]: Pro of entry i against Ant of entry j.
  std::vector<MatchResult> ret(n * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      Rng rng = DeriveStream(seed, 1000 + i * n + j);
      ret[i * n + j] = PlayMatch(game, *entries[i].policies.pro, *entries[j].policies.ant,
                                 episodes_per_pair, rng);
      t.zero_sum_violations += ret[i * n + j].zero_sum_violations;
    }
  }
  t.cells.assign(n * n, 0.0);
  t.matches.assign(n * n, 0);
  t.half_widths.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const MatchResult& x = ret[i * n + j];
      const MatchResult& y = ret[j * n + i];
      t.cells[i * n + j] = 0.5 * (x.mean_return - y.mean_return);
      t.matches[i * n + j] = x.episodes + y.episodes;
      t.half_widths[i * n + j] =
          0.5 * std::sqrt(x.half_width * x.half_width + y.half_width * y.half_width);
    }
  }
  t.rr_return.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (j != i) t.rr_return[i] += t.cells[i * n + j];
    }
  }
  const auto [lo, hi] = std::minmax_element(t.rr_return.begin(), t.rr_return.end());
  t.rr_normalized.assign(n, 0.5);
  if (*hi > *lo) {
    for (size_t i = 0; i < n; ++i) t.rr_normalized[i] = (t.rr_return[i] - *lo) / (*hi - *lo);
  }
  return t;
}

std::vector<CohortEntry> CohortFromCheckpoints(const std::vector<Checkpoint>& checkpoints,
                                               GamePtr game,
                                               std::vector<std::string>* warnings) {
  std::vector<CohortEntry> out;
  for (const Checkpoint& c : checkpoints) {
    const std::string name = c.method + "@" + std::to_string(c.episode);
    try {
      out.push_back({name, c.episode, LoadPolicies(c, game)});
    } catch (const std::exception& e) {
      if (warnings) warnings->push_back("skipped " + name + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json Curve::ToJson() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const CurvePoint& p : points) {
    pts.push_back({{"episode", p.episode}, {"value", p.value}, {"matches", p.matches}});
  }
  return {{"name", name}, {"points", pts}};
}

std::string Curve::Csv() const {
  std::ostringstream out;
  out << "episode,value,matches\n";
  for (const CurvePoint& p : points) {
    out << p.episode << ',' << FormatDouble(p.value) << ',' << p.matches << '\n';
  }
  return out.str();
}

Curve NashConvCurve(const Game& game, const std::vector<CohortEntry>& entries, double tol) {
  Curve c;
  c.name = "nashconv";
  for (const CohortEntry& e : entries) {
    const double v = NashConv(game, ToTeamTable(game, *e.policies.pro),
                              ToTeamTable(game, *e.policies.ant), tol)
                         .nashconv;
    c.points.push_back({e.episode, v, 0});
  }
  return c;
}

Curve VsBotCurve(GamePtr game, const std::vector<CohortEntry>& entries, int64_t episodes,
                 uint64_t seed) {
  Curve c;
  c.name = "vsbot";
  const ScriptedPolicy bot_pro(game, Team::kPro);
  const ScriptedPolicy bot_ant(game, Team::kAnt);
  for (size_t k = 0; k < entries.size(); ++k) {
    Rng rng = DeriveStream(seed, 5000 + 2 * k);
    const MatchResult as_pro = PlayMatch(*game, *entries[k].policies.pro, bot_ant, episodes, rng);
    Rng rng2 = DeriveStream(seed, 5001 + 2 * k);
    const MatchResult as_ant = PlayMatch(*game, bot_pro, *entries[k].policies.ant, episodes, rng2);
    c.points.push_back({entries[k].episode, 0.5 * (as_pro.mean_return - as_ant.mean_return),
                        as_pro.episodes + as_ant.episodes});
  }
  return c;
}

nlohmann::json TrendResult::ToJson() const {
  return {{"cells", cells},
          {"later_wins", later_wins},
          {"ties", ties},
          {"violations", violations},
          {"fraction_positive", fraction_positive},
          {"fraction_not_worse", fraction_not_worse}};
}

TrendResult OptimizationTrend(const PayoffTable& table, double tie_tol) {
  TrendResult r;
  for (size_t i = 1; i < table.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      const double x = table.cell(i, j);
      ++r.cells;
      if (x > tie_tol) {
        ++r.later_wins;
      } else if (x < -tie_tol) {
        ++r.violations;
      } else {
        ++r.ties;
      }
    }
  }
  if (r.cells > 0) {
    r.fraction_positive = static_cast<double>(r.later_wins) / static_cast<double>(r.cells);
    r.fraction_not_worse = 1.0 - static_cast<double>(r.violations) / static_cast<double>(r.cells);
  } else {
    r.fraction_positive = 1.0;
    r.fraction_not_worse = 1.0;
  }
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json AblationConfig::ToJson() const {
  nlohmann::json s = nlohmann::json::array();
  for (size_t x : sizes) {
    if (x == 0) {
      s.push_back("full");
    } else {
      s.push_back(x);
    }
  }
  return {{"sizes", s}, {"train", train.ToJson()}, {"seeds", seeds},
          {"episodes_per_pair", episodes_per_pair}};
}

void AblationConfig::Validate(const std::string& path) const {
  if (sizes.empty()) throw ConfigError(JoinPath(path, "sizes"), "at least one size is needed");
  auto rank = [](size_t x) { return x == 0 ? SIZE_MAX : x; };
  for (size_t k = 1; k < sizes.size(); ++k) {
    if (rank(sizes[k]) < rank(sizes[k - 1])) {
      throw ConfigError(JoinPath(path, "sizes") + "[" + std::to_string(k) + "]",
                        "buffer sizes must not decrease");
    }
  }
  if (seeds.empty()) throw ConfigError(JoinPath(path, "seeds"), "at least one seed is needed");
  if (episodes_per_pair < 1) {
    throw ConfigError(JoinPath(path, "episodes_per_pair"), "must be positive");
  }
  train.Validate(JoinPath(path, "train"));
}

AblationResult AblateBuffer(GamePtr game, const AblationConfig& config) {
  config.Validate();
  AblationResult out;
  out.runs.resize(config.sizes.size());
  out.final_rr.assign(config.sizes.size(), std::vector<double>(config.seeds.size(), 0.0));
  for (size_t k = 0; k < config.sizes.size(); ++k) {
    for (uint64_t seed : config.seeds) {
      TrainConfig tc = config.train;
      tc.seed = seed;
      tc.buffer_mode = config.sizes[k] == 0 ? BufferMode::kFull : BufferMode::kBounded;
      tc.buffer_capacity = config.sizes[k];
      AblationRun run;
      run.size = config.sizes[k];
      run.seed = seed;
      run.result = Train(game, tc);
      const auto cohort = CohortFromCheckpoints(run.result.checkpoints, game);
      if (cohort.size() >= 2) {
        const PayoffTable t = RoundRobin(*game, cohort, config.episodes_per_pair, seed);
        out.zero_sum_violations += t.zero_sum_violations;
        run.trend = OptimizationTrend(t);
      }
      out.runs[k].push_back(std::move(run));
    }
  }
  if (config.sizes.size() < 2) return out;
  for (size_t s = 0; s < config.seeds.size(); ++s) {
    std::vector<CohortEntry> finals;
    for (size_t k = 0; k < config.sizes.size(); ++k) {
      const Checkpoint& last = out.runs[k][s].result.checkpoints.back();
      const std::string name = config.sizes[k] == 0 ? "full" : std::to_string(config.sizes[k]);
      finals.push_back({name, last.episode, LoadPolicies(last, game)});
    }
    PayoffTable t = RoundRobin(*game, finals, config.episodes_per_pair, config.seeds[s]);
    out.zero_sum_violations += t.zero_sum_violations;
    for (size_t k = 0; k < config.sizes.size(); ++k) out.final_rr[k][s] = t.rr_normalized[k];
    out.final_tables.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json doc = {{"type", "eval_report"}, {"version", 1}, {"config", config},
                        {"seeds", seeds}};
  doc["curves"] = nlohmann::json::object();
  for (const auto& [name, c] : curves) doc["curves"][name] = c.ToJson();
  doc["payoff_tables"] = nlohmann::json::object();
  for (const auto& [name, t] : tables) doc["payoff_tables"][name] = t.ToJson();
  doc["trends"] = nlohmann::json::object();
  for (const auto& [name, t] : trends) doc["trends"][name] = t.ToJson();
  doc["scalars"] = scalars;
  return doc;
}

void EvalReport::Write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  WriteJsonFile(dir + "/report.json", ToJson());
  for (const auto& [name, c] : curves) WriteTextFile(dir + "/curve_" + name + ".csv", c.Csv());
  for (const auto& [name, t] : tables) {
    WriteTextFile(dir + "/payoff_" + name + ".csv", t.CellsCsv());
  }
}

}  // namespace fm3q
