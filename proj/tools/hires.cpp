// Copyright 2026 The HiRES Authors
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

// Command-line front end: simulate, riskmap, score, detect, export, eval.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hires/config.hpp"
#include "hires/detect.hpp"
#include "hires/geojson.hpp"
#include "hires/ingest.hpp"
#include "hires/pipeline.hpp"
#include "hires/riskfield.hpp"
#include "hires/score.hpp"
#include "hires/simgen.hpp"

namespace fs = std::filesystem;
using namespace hires;

namespace {

RunConfig load_config(const std::string& path) {
  if (path.empty()) {
    std::cerr << "notice: no config file given, using defaults\n";
    return RunConfig();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RunConfig cfg = RunConfig::parse(in);
  for (const std::string& w : cfg.warnings()) {
    std::cerr << "warning: " << w << "\n";
  }
  return cfg;
}

std::pair<std::int64_t, std::int64_t> parse_day_range(const std::string& s) {
  const std::size_t dots = s.find("..");
  if (dots == std::string::npos) {
    throw std::runtime_error("day range must be YYYY-MM-DD..YYYY-MM-DD");
  }
  const std::int64_t a = parse_day(std::string_view(s).substr(0, dots));
  const std::int64_t b = parse_day(std::string_view(s).substr(dots + 2));
  if (b < a) throw std::runtime_error("empty day range: " + s);
  return {a, b};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  return out;
}

TrajectoryData load_trajectories(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  TrajectoryData data = parse_trajectories(in);
  if (data.stats.rejected > 0) {
    std::cerr << "warning: rejected " << data.stats.rejected
              << " malformed trajectory rows\n";
  }
  return data;
}

CaseRegistry load_registry(const std::string& path, int default_recovery) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open registry file: " + path);
  return parse_registry(in, default_recovery);
}

// riskmap_YYYY-MM-DD.csv files in a directory, keyed by day
std::map<std::int64_t, RiskMap> load_risk_maps(const std::string& dir) {
  std::map<std::int64_t, RiskMap> maps;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("riskmap_", 0) != 0 || entry.path().extension() != ".csv") {
      continue;
    }
    const std::int64_t day = parse_day(name.substr(8, 10));
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + entry.path().string());
    maps.emplace(day, read_risk_map(in, day));
  }
  if (maps.empty()) {
    throw std::runtime_error("no riskmap_*.csv files found in " + dir);
  }
  return maps;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_config(config_path);
  WorldConfig wc = cfg.world();
  if (seed) wc.rng_seed = *seed;
  fs::create_directories(out_dir);
  World world = generate_world(wc);
  auto traj = open_out(fs::path(out_dir) / "trajectories.csv");
  auto reg = open_out(fs::path(out_dir) / "registry.csv");
  SimStats stats = simulate(world, traj, reg);
  std::cout << "simulated " << wc.n_agents << " agents over " << wc.n_days
            << " days: " << stats.n_records << " records, "
            << stats.n_infected << " infected\n";
  return 0;
}

int cmd_riskmap(const std::string& config_path, const std::string& traj_path,
                const std::string& registry_path, const std::string& days,
                const std::string& out_dir, int threads) {
  RunConfig cfg = load_config(config_path);
  const PipelineConfig pc{cfg.cleaning(), cfg.utc_offset_s(),
                          cfg.terminal_dwell_s()};
  TrajectoryData data = load_trajectories(traj_path);
  CaseRegistry registry =
      load_registry(registry_path, cfg.decay().recovery_days);
  StayFractionTable table = stay_fractions_from(data, pc);

  std::int64_t first, last;
  if (days.empty()) {
    if (table.days().empty()) throw std::runtime_error("no trajectory data");
    first = table.days().begin()->first;
    last = table.days().rbegin()->first;
  } else {
    std::tie(first, last) = parse_day_range(days);
    if (table.days().empty() || first > table.days().rbegin()->first ||
        last < table.days().begin()->first) {
      std::cerr << "warning: requested day range has no trajectory data; "
                   "maps will be zero\n";
    }
  }
  RiskSeries series = compute_risk_series(table, registry, cfg.decay(), first,
                                          last, data.cells, threads);
  fs::create_directories(out_dir);
  for (const auto& [day, map] : series.maps) {
    auto out = open_out(fs::path(out_dir) /
                        ("riskmap_" + format_day(day) + ".csv"));
    write_risk_map(out, map);
  }
  std::cout << "wrote " << series.maps.size() << " risk maps to " << out_dir
            << "\n";
  return 0;
}

int cmd_score(const std::string& config_path, const std::string& maps_dir,
              const std::string& traj_path, const std::string& registry_path,
              bool leave_one_out, const std::string& out_path) {
  RunConfig cfg = load_config(config_path);
  const PipelineConfig pc{cfg.cleaning(), cfg.utc_offset_s(),
                          cfg.terminal_dwell_s()};
  ScoreParams sp = cfg.score();
  sp.leave_one_out = sp.leave_one_out || leave_one_out;
  if (sp.leave_one_out && registry_path.empty()) {
    throw std::runtime_error("--leave-one-out needs --registry");
  }
  TrajectoryData data = load_trajectories(traj_path);
  CaseRegistry registry;
  if (!registry_path.empty()) {
    registry = load_registry(registry_path, sp.decay.recovery_days);
  }
  StayFractionTable table = stay_fractions_from(data, pc);
  RiskSeries series;
  series.maps = load_risk_maps(maps_dir);
  const std::int64_t first = series.maps.begin()->first;
  const std::int64_t last = series.maps.rbegin()->first;
  std::vector<std::string> ids = user_ids(data);
  auto scores = score_cohort(ids, table, registry, series, sp, first, last);
  std::size_t missing = 0;
  for (const auto& s : scores) missing += s.missing_trajectory;
  if (missing > 0) {
    std::cerr << "warning: " << missing
              << " users had no trajectory data in the scored range\n";
  }
  auto out = open_out(out_path);
  write_scores(out, scores);
  std::cout << "scored " << scores.size() << " users over ["
            << format_day(first) << ", " << format_day(last) << "]\n";
  return 0;
}

void print_metrics(const std::string& name, const DetectionMetrics& m) {
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("undefined");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  std::cout << name << ": DR=" << fmt(m.dr) << " FAR=" << fmt(m.far)
            << " ACC=" << fmt(m.acc) << "\n";
}

// Per-user evaluation day: a case diagnosed inside the scored range is
// judged on its diagnosis day, everyone else on the final day.
std::int64_t eval_day(const PersonScoreSeries& s, const CaseRegistry& reg) {
  const std::int64_t last = s.first_day + std::int64_t(s.base.size()) - 1;
  const CaseEntry* e = reg.find(s.user_id);
  if (e != nullptr && e->label == CaseLabel::kConfirmed &&
      *e->confirmed_day >= s.first_day && *e->confirmed_day <= last) {
    return *e->confirmed_day;
  }
  return last;
}

int cmd_detect(const std::string& config_path, const std::string& scores_path,
               const std::string& registry_path, const std::string& method,
               double q, const std::string& feature_days,
               const std::string& out_path, const std::string& model_out,
               std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_config(config_path);
  std::ifstream sin(scores_path, std::ios::binary);
  if (!sin) throw std::runtime_error("cannot open scores: " + scores_path);
  auto scores = read_scores(sin);
  if (scores.empty()) throw std::runtime_error("no scores to detect on");
  CaseRegistry registry =
      load_registry(registry_path, cfg.decay().recovery_days);
  auto out = open_out(out_path);

  if (method == "stat") {
    std::vector<double> null_sample;
    std::vector<std::pair<std::string, double>> tested;
    for (const auto& s : scores) {
      const double score = s.window_on(eval_day(s, registry));
      const CaseEntry* e = registry.find(s.user_id);
      if (e == nullptr) {
        throw std::runtime_error("user missing from registry: " + s.user_id);
      }
      if (e->label == CaseLabel::kNormal) null_sample.push_back(score);
      tested.emplace_back(s.user_id, score);
    }
    EmpiricalCdf cdf(std::move(null_sample));
    const double threshold = cdf.critical_value(q);
    auto outcomes = detect_stat(tested, threshold, cdf);
    out << "user_id,score,flag,p_value\n";
    char buf[64];
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g", tested[i].second,
                    outcomes[i].suspected ? "suspected" : "normal",
                    outcomes[i].p_value);
      out << outcomes[i].user_id << ',' << buf << "\n";
    }
    std::cout << "threshold(q=" << q << ") = " << threshold << "\n";
    print_metrics("stat", compute_metrics(confusion(outcomes, registry)));
    return 0;
  }

  if (method != "tree" && method != "forest") {
    throw std::runtime_error("unknown method: " + method);
  }
  std::int64_t win_first, win_last;
  if (feature_days.empty()) {
    // default: trailing 8 days of coverage
    win_last = scores.front().first_day +
               std::int64_t(scores.front().base.size()) - 1;
    win_first = std::max(scores.front().first_day, win_last - 7);
  } else {
    std::tie(win_first, win_last) = parse_day_range(feature_days);
  }
  FeatureMatrix m = build_features(scores, registry, win_first, win_last);
  ForestParams fp = cfg.forest();
  if (seed) fp.seed = *seed;
  SplitIndices split = stratified_split(m.labels, 0.8, fp.seed);
  FeatureMatrix train, test;
  for (std::size_t i : split.train) {
    train.users.push_back(m.users[i]);
    train.rows.push_back(m.rows[i]);
    train.labels.push_back(m.labels[i]);
  }
  for (std::size_t i : split.test) {
    test.users.push_back(m.users[i]);
    test.rows.push_back(m.rows[i]);
    test.labels.push_back(m.labels[i]);
  }
  std::vector<DetectionOutcome> outcomes;
  if (method == "tree") {
    DecisionTree tree = DecisionTree::train(train, fp.tree);
    for (std::size_t i = 0; i < test.rows.size(); ++i) {
      outcomes.push_back(
          DetectionOutcome{test.users[i], tree.predict(test.rows[i]) == 1, 0});
    }
    if (!model_out.empty()) {
      auto mo = open_out(model_out);
      tree.save(mo);
    }
  } else {
    RandomForest forest = RandomForest::train(train, fp);
    for (std::size_t i = 0; i < test.rows.size(); ++i) {
      outcomes.push_back(DetectionOutcome{test.users[i],
                                          forest.predict(test.rows[i]) == 1,
                                          0});
    }
    if (!model_out.empty()) {
      auto mo = open_out(model_out);
      forest.save(mo);
    }
  }
  out << "user_id,flag\n";
  for (const auto& o : outcomes) {
    out << o.user_id << ',' << (o.suspected ? "suspected" : "normal") << "\n";
  }
  print_metrics(method, compute_metrics(confusion(outcomes, registry)));
  return 0;
}

int cmd_export(const std::string& map_path, const std::string& format,
               const std::string& day, const std::string& out_path) {
  if (format != "geojson") {
    throw std::runtime_error("unknown export format: " + format);
  }
  std::int64_t d;
  if (!day.empty()) {
    d = parse_day(day);
  } else {
    const std::string name = fs::path(map_path).filename().string();
    if (name.rfind("riskmap_", 0) != 0 || name.size() < 22) {
      throw std::runtime_error(
          "cannot infer day from filename; pass --day YYYY-MM-DD");
    }
    d = parse_day(name.substr(8, 10));
  }
  std::ifstream in(map_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map: " + map_path);
  RiskMap map = read_risk_map(in, d);
  auto out = open_out(out_path);
  write_geojson(out, map);
  std::cout << "exported " << map.cells.size() << " cells\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& scores_path,
             const std::string& registry_path, std::vector<double> rates,
             const std::string& feature_days, const std::string& out_path,
             std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_config(config_path);
  std::ifstream sin(scores_path, std::ios::binary);
  if (!sin) throw std::runtime_error("cannot open scores: " + scores_path);
  auto scores = read_scores(sin);
  if (scores.empty()) throw std::runtime_error("no scores to evaluate");
  CaseRegistry registry =
      load_registry(registry_path, cfg.decay().recovery_days);
  std::int64_t win_first, win_last;
  if (feature_days.empty()) {
    win_last = scores.front().first_day +
               std::int64_t(scores.front().base.size()) - 1;
    win_first = std::max(scores.front().first_day, win_last - 7);
  } else {
    std::tie(win_first, win_last) = parse_day_range(feature_days);
  }
  FeatureMatrix m = build_features(scores, registry, win_first, win_last);
  SweepParams sp;
  sp.q = cfg.detect_q();
  sp.forest = cfg.forest();
  sp.seed = seed ? *seed : cfg.seed();
  for (double& r : rates) r /= 100.0;  // given in percent
  auto table = evaluate_sweep(m, rates, sp);
  auto out = open_out(out_path);
  out << "rate_percent,method,acc,dr,far,train_seconds\n";
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("undefined");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return std::string(buf);
  };
  for (const SweepRow& row : table) {
    char rate[16];
    std::snprintf(rate, sizeof(rate), "%g", row.rate * 100.0);
    out << rate << ",stat," << fmt(row.stat.acc) << ',' << fmt(row.stat.dr)
        << ',' << fmt(row.stat.far) << ",0\n";
    out << rate << ",tree," << fmt(row.tree.acc) << ',' << fmt(row.tree.dr)
        << ',' << fmt(row.tree.far) << ',' << row.tree_train_s << "\n";
    out << rate << ",forest," << fmt(row.forest.acc) << ','
        << fmt(row.forest.dr) << ',' << fmt(row.forest.far) << ','
        << row.forest_train_s << "\n";
  }
  std::cout << "evaluated " << table.size() << " infection rates\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HiRES epidemic risk engine"};
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir, traj_path, registry_path;
  std::string days, maps_dir, scores_path, method = "stat", map_path;
  std::string format = "geojson", day, feature_days, model_out;
  std::string sweep = "1,3,10,23,50";
  double q = 0.95;
  int threads = 1;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus");
  sim->add_option("--config", config_path);
  sim->add_option("--out", out_dir)->required();
  sim->add_option("--seed", seed);

  auto* risk = app.add_subcommand("riskmap", "Compute daily risk maps");
  risk->add_option("--config", config_path);
  risk->add_option("--traj", traj_path)->required();
  risk->add_option("--registry", registry_path)->required();
  risk->add_option("--days", days, "YYYY-MM-DD..YYYY-MM-DD");
  risk->add_option("--out", out_dir)->required();
  risk->add_option("--threads", threads);

  auto* score = app.add_subcommand("score", "Compute personal risk scores");
  score->add_option("--config", config_path);
  score->add_option("--maps", maps_dir)->required();
  score->add_option("--traj", traj_path)->required();
  score->add_option("--registry", registry_path);
  score->add_flag("--leave-one-out", "subtract a case's own contribution");
  score->add_option("--out", out_path)->required();

  auto* det = app.add_subcommand("detect", "Detect suspected cases");
  det->add_option("--config", config_path);
  det->add_option("--scores", scores_path)->required();
  det->add_option("--registry", registry_path)->required();
  det->add_option("--method", method)
      ->check(CLI::IsMember({"stat", "tree", "forest"}));
  det->add_option("--q", q);
  det->add_option("--feature-days", feature_days, "YYYY-MM-DD..YYYY-MM-DD");
  det->add_option("--model-out", model_out);
  det->add_option("--seed", seed);
  det->add_option("--out", out_path)->required();

  auto* exp = app.add_subcommand("export", "Export a risk map");
  exp->add_option("--map", map_path)->required();
  exp->add_option("--format", format);
  exp->add_option("--day", day, "YYYY-MM-DD");
  exp->add_option("--out", out_path)->required();

  auto* ev = app.add_subcommand("eval", "Sweep infection rates");
  ev->add_option("--config", config_path);
  ev->add_option("--scores", scores_path)->required();
  ev->add_option("--registry", registry_path)->required();
  ev->add_option("--sweep", sweep, "rates in percent, comma separated");
  ev->add_option("--feature-days", feature_days);
  ev->add_option("--seed", seed);
  ev->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed);
    if (risk->parsed()) {
      return cmd_riskmap(config_path, traj_path, registry_path, days, out_dir,
                         threads);
    }
    if (score->parsed()) {
      return cmd_score(config_path, maps_dir, traj_path, registry_path,
                       score->count("--leave-one-out") > 0, out_path);
    }
    if (det->parsed()) {
      return cmd_detect(config_path, scores_path, registry_path, method, q,
                        feature_days, out_path, model_out, seed);
    }
    if (exp->parsed()) return cmd_export(map_path, format, day, out_path);
    if (ev->parsed()) {
      std::vector<double> rates;
      std::stringstream ss(sweep);
      std::string part;
      while (std::getline(ss, part, ',')) rates.push_back(std::stod(part));
      return cmd_eval(config_path, scores_path, registry_path, rates,
                      feature_days, out_path, seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
