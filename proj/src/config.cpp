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

#include "hires/config.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <set>
#include <stdexcept>

namespace hires {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed",
      "time.utc_offset_s",
      "ingest.terminal_dwell_s",
      "cleaning.aba_window_s",
      "cleaning.speed_cut_kmh",
      "cleaning.min_dwell_s",
      "cleaning.kmeans_k",
      "cleaning.kmeans_max_iter",
      "decay.incubation_days",
      "decay.outdoor_weights",
      "decay.viral_weights",
      "decay.recovery_days",
      "decay.include_diagnosis_day",
      "score.window_days",
      "score.reducer",
      "score.leave_one_out",
      "detect.q",
      "detect.trees",
      "detect.max_depth",
      "detect.min_leaf",
      "detect.features_per_split",
      "sim.grid_rows",
      "sim.grid_cols",
      "sim.cell_spacing_m",
      "sim.origin_lat",
      "sim.origin_lng",
      "sim.agents",
      "sim.days",
      "sim.start_day",
      "sim.infection_rate",
      "sim.diagnosis_lag_min_days",
      "sim.diagnosis_lag_max_days",
      "sim.hazard_per_hour",
  };
  return keys;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": empty key");
    }
    if (!known_keys().count(key)) {
      cfg.warnings_.push_back("unknown config key: " + key);
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string RunConfig::get_string(const std::string& key,
                                  std::string def) const {
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double RunConfig::get_double(const std::string& key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  double v = 0.0;
  const std::string& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::runtime_error("config key " + key + ": bad number '" + s + "'");
  }
  return v;
}

std::int64_t RunConfig::get_int(const std::string& key,
                                std::int64_t def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::int64_t v = 0;
  const std::string& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::runtime_error("config key " + key + ": bad integer '" + s +
                             "'");
  }
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::runtime_error("config key " + key + ": bad boolean '" +
                           it->second + "'");
}

std::vector<double> RunConfig::get_doubles(const std::string& key,
                                           std::vector<double> def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<double> out;
  const std::string& s = it->second;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string part = trim(s.substr(pos, comma - pos));
    double v = 0.0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size()) {
      throw std::runtime_error("config key " + key + ": bad list '" + s + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

CleaningConfig RunConfig::cleaning() const {
  CleaningConfig c;
  c.aba_window_s = get_double("cleaning.aba_window_s", c.aba_window_s);
  c.speed_cut_kmh = get_double("cleaning.speed_cut_kmh", c.speed_cut_kmh);
  c.min_dwell_s = get_double("cleaning.min_dwell_s", c.min_dwell_s);
  c.kmeans_k = int(get_int("cleaning.kmeans_k", c.kmeans_k));
  c.kmeans_max_iter = int(get_int("cleaning.kmeans_max_iter",
                                  c.kmeans_max_iter));
  return c;
}

DecayParams RunConfig::decay() const {
  DecayParams d;
  d.incubation_days = int(get_int("decay.incubation_days", d.incubation_days));
  d.outdoor_weights = get_doubles("decay.outdoor_weights", d.outdoor_weights);
  d.viral_weights = get_doubles("decay.viral_weights", d.viral_weights);
  d.recovery_days = int(get_int("decay.recovery_days", d.recovery_days));
  d.include_diagnosis_day =
      get_bool("decay.include_diagnosis_day", d.include_diagnosis_day);
  d.validate();
  return d;
}

ScoreParams RunConfig::score() const {
  ScoreParams s;
  s.decay = decay();
  s.window_days = int(get_int("score.window_days", s.window_days));
  const std::string reducer = get_string("score.reducer", "max");
  if (reducer == "max") {
    s.reducer = WindowReducer::kMax;
  } else if (reducer == "sum") {
    s.reducer = WindowReducer::kSum;
  } else if (reducer == "mean") {
    s.reducer = WindowReducer::kMean;
  } else {
    throw std::runtime_error("config key score.reducer: unknown reducer '" +
                             reducer + "'");
  }
  s.leave_one_out = get_bool("score.leave_one_out", s.leave_one_out);
  return s;
}

WorldConfig RunConfig::world() const {
  WorldConfig w;
  w.grid_rows = int(get_int("sim.grid_rows", w.grid_rows));
  w.grid_cols = int(get_int("sim.grid_cols", w.grid_cols));
  w.cell_spacing_m = get_double("sim.cell_spacing_m", w.cell_spacing_m);
  w.origin_lat = get_double("sim.origin_lat", w.origin_lat);
  w.origin_lng = get_double("sim.origin_lng", w.origin_lng);
  w.n_agents = int(get_int("sim.agents", w.n_agents));
  w.n_days = int(get_int("sim.days", w.n_days));
  if (has("sim.start_day")) {
    w.start_day = parse_day(get_string("sim.start_day", ""));
  }
  w.infection_rate = get_double("sim.infection_rate", w.infection_rate);
  w.diagnosis_lag_min_days =
      int(get_int("sim.diagnosis_lag_min_days", w.diagnosis_lag_min_days));
  w.diagnosis_lag_max_days =
      int(get_int("sim.diagnosis_lag_max_days", w.diagnosis_lag_max_days));
  w.hazard_per_hour = get_double("sim.hazard_per_hour", w.hazard_per_hour);
  w.rng_seed = seed();
  w.utc_offset_s = utc_offset_s();
  w.validate();
  return w;
}

std::int64_t RunConfig::utc_offset_s() const {
  return get_int("time.utc_offset_s", kDefaultUtcOffsetS);
}

std::int64_t RunConfig::terminal_dwell_s() const {
  return get_int("ingest.terminal_dwell_s", 3600);
}

std::uint64_t RunConfig::seed() const {
  return std::uint64_t(get_int("seed", 20200101));
}

double RunConfig::detect_q() const {
  const double q = get_double("detect.q", 0.95);
  if (q <= 0.0 || q >= 1.0) {
    throw std::runtime_error("config key detect.q must be in (0, 1)");
  }
  return q;
}

ForestParams RunConfig::forest() const {
  ForestParams f;
  f.n_trees = int(get_int("detect.trees", f.n_trees));
  f.tree.max_depth = int(get_int("detect.max_depth", f.tree.max_depth));
  f.tree.min_leaf = int(get_int("detect.min_leaf", f.tree.min_leaf));
  f.features_per_split =
      int(get_int("detect.features_per_split", f.features_per_split));
  f.seed = seed();
  return f;
}

}  // namespace hires
