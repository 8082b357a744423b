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

#include "hires/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "hires/ingest.hpp"

namespace hires {
namespace {

constexpr double kMetersPerDegree = 6371000.0 * std::numbers::pi / 180.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// per-(agent, day) stream, independent of evaluation order
std::mt19937_64 day_rng(std::uint64_t seed, int agent, std::int64_t day) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(std::uint64_t(agent) * 0x100000001b3ULL ^
                                   std::uint64_t(day))));
}

struct Block {
  std::int64_t start_s;  // seconds into the local day
  int cell;
};

}  // namespace

void WorldConfig::validate() const {
  if (grid_rows <= 0 || grid_cols <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (cell_spacing_m <= 0.0) {
    throw std::invalid_argument("cell spacing must be positive");
  }
  if (n_agents <= 0 || n_days <= 0) {
    throw std::invalid_argument("agent and day counts must be positive");
  }
  if (infection_rate <= 0.0 || infection_rate >= 1.0) {
    throw std::invalid_argument("infection_rate must be in (0, 1)");
  }
  if (diagnosis_lag_min_days < 1 ||
      diagnosis_lag_max_days < diagnosis_lag_min_days) {
    throw std::invalid_argument("bad diagnosis lag range");
  }
  if (hazard_per_hour < 0.0) {
    throw std::invalid_argument("hazard must be non-negative");
  }
}

World generate_world(const WorldConfig& config) {
  config.validate();
  World world;
  world.config = config;
  const double dlat = config.cell_spacing_m / kMetersPerDegree;
  const double dlng =
      config.cell_spacing_m /
      (kMetersPerDegree *
       std::cos(config.origin_lat * std::numbers::pi / 180.0));
  world.cell_keys.reserve(std::size_t(config.grid_rows) *
                          std::size_t(config.grid_cols));
  for (int r = 0; r < config.grid_rows; ++r) {
    for (int c = 0; c < config.grid_cols; ++c) {
      char key[48];
      std::snprintf(key, sizeof(key), "d%d|l%d|c%d", r / 10, r, c);
      world.cell_keys.emplace_back(key);
      world.cells.emplace(key, CellInfo{config.origin_lat + r * dlat,
                                        config.origin_lng + c * dlng});
    }
  }
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_int_distribution<int> row(0, config.grid_rows - 1);
  std::uniform_int_distribution<int> col(0, config.grid_cols - 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  world.agents.reserve(std::size_t(config.n_agents));
  const int commute_reach = 15;  // cells; keeps switching speed plausible
  for (int a = 0; a < config.n_agents; ++a) {
    AgentProfile p;
    const int hr = row(rng), hc = col(rng);
    p.home_cell = hr * config.grid_cols + hc;
    const int wr = std::clamp(
        hr + int(std::llround((uni(rng) * 2.0 - 1.0) * commute_reach)), 0,
        config.grid_rows - 1);
    const int wc = std::clamp(
        hc + int(std::llround((uni(rng) * 2.0 - 1.0) * commute_reach)), 0,
        config.grid_cols - 1);
    p.work_cell = wr * config.grid_cols + wc;
    p.commutes = uni(rng) < 0.85;
    p.errand_prob = 0.3 + 0.4 * uni(rng);
    world.agents.push_back(p);
  }
  return world;
}

namespace {

class Simulation {
 public:
  Simulation(const World& world, std::ostream& traj, std::ostream& reg)
      : world_(world), cfg_(world.config), traj_(traj), reg_(reg) {}

  SimStats run() {
    const int n = cfg_.n_agents;
    infection_day_.assign(std::size_t(n), kNever);
    confirmed_day_.assign(std::size_t(n), kNever);
    seed_infections();
    write_traj_header();
    const std::int64_t last_day = cfg_.start_day + cfg_.n_days - 1;
    std::mt19937_64 rng(splitmix64(cfg_.rng_seed ^ 0x5eedULL));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (std::int64_t d = cfg_.start_day; d <= last_day; ++d) {
      // hourly infectious occupancy
      std::vector<std::unordered_map<int, int>> occupancy(24);
      auto schedules = std::vector<std::vector<Block>>(std::size_t(n));
      for (int a = 0; a < n; ++a) {
        schedules[std::size_t(a)] = schedule(a, d);
        if (infectious_on(a, d)) {
          for (int h = 0; h < 24; ++h) {
            ++occupancy[h][cell_at(schedules[std::size_t(a)], h)];
          }
        }
      }
      for (int a = 0; a < n; ++a) {
        if (infection_day_[std::size_t(a)] != kNever) continue;
        double hours = 0.0;
        for (int h = 0; h < 24; ++h) {
          auto it = occupancy[h].find(cell_at(schedules[std::size_t(a)], h));
          if (it != occupancy[h].end()) hours += double(it->second);
        }
        if (hours <= 0.0) continue;  // zero hazard, never infected
        const double p = 1.0 - std::exp(-cfg_.hazard_per_hour * hours);
        if (uni(rng) < p) infect(a, d, rng);
      }
      for (int a = 0; a < n; ++a) {
        write_day_records(a, d, schedules[std::size_t(a)]);
      }
    }
    write_registry();
    return stats_;
  }

 private:
  static constexpr std::int64_t kNever =
      std::numeric_limits<std::int64_t>::min();

  void seed_infections() {
    const int n_seed =
        int(std::ceil(cfg_.infection_rate * double(cfg_.n_agents)));
    std::mt19937_64 rng(splitmix64(cfg_.rng_seed ^ 0x1d5eedULL));
    std::vector<int> agents(std::size_t(cfg_.n_agents));
    std::iota(agents.begin(), agents.end(), 0);
    std::shuffle(agents.begin(), agents.end(), rng);
    // spread index infections over the corpus so confirmations do too
    const std::int64_t lo = cfg_.start_day - 5;
    const std::int64_t hi =
        std::max(lo, cfg_.start_day + std::int64_t(cfg_.n_days) - 12);
    std::uniform_int_distribution<std::int64_t> when(lo, hi);
    for (int i = 0; i < n_seed; ++i) {
      infect(agents[std::size_t(i)], when(rng), rng);
    }
  }

  void infect(int agent, std::int64_t day, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> lag(cfg_.diagnosis_lag_min_days,
                                           cfg_.diagnosis_lag_max_days);
    infection_day_[std::size_t(agent)] = day;
    confirmed_day_[std::size_t(agent)] = day + lag(rng);
    ++stats_.n_infected;
  }

  bool infectious_on(int agent, std::int64_t day) const {
    const std::int64_t inf = infection_day_[std::size_t(agent)];
    if (inf == kNever) return false;
    return inf < day && day < confirmed_day_[std::size_t(agent)];
  }

  bool isolated_on(int agent, std::int64_t day) const {
    const std::int64_t conf = confirmed_day_[std::size_t(agent)];
    return conf != kNever && day >= conf;
  }

  std::vector<Block> schedule(int agent, std::int64_t day) const {
    const AgentProfile& p = world_.agents[std::size_t(agent)];
    if (isolated_on(agent, day)) return {{0, p.home_cell}};
    auto rng = day_rng(cfg_.rng_seed, agent, day);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Block> blocks{{0, p.home_cell}};
    auto jitter = [&](double span_s) {
      return std::int64_t(std::llround((uni(rng) * 2.0 - 1.0) * span_s));
    };
    if (p.commutes) {
      blocks.push_back({8 * 3600 + jitter(1800), p.work_cell});
      std::int64_t back = 17 * 3600 + jitter(1800);
      if (uni(rng) < p.errand_prob) {
        blocks.push_back({back, errand_cell(p, rng)});
        back += 3600 + std::int64_t(std::llround(uni(rng) * 1800.0));
      }
      blocks.push_back({back, p.home_cell});
    } else if (uni(rng) < p.errand_prob) {
      const std::int64_t out = 10 * 3600 + jitter(3600);
      blocks.push_back({out, errand_cell(p, rng)});
      blocks.push_back(
          {out + 3600 + std::int64_t(std::llround(uni(rng) * 3600.0)),
           p.home_cell});
    }
    // drop degenerate repeats
    std::vector<Block> out;
    for (const Block& b : blocks) {
      if (!out.empty() && out.back().cell == b.cell) continue;
      out.push_back(b);
    }
    return out;
  }

  int errand_cell(const AgentProfile& p, std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> step(-3, 3);
    const int hr = p.home_cell / cfg_.grid_cols;
    const int hc = p.home_cell % cfg_.grid_cols;
    const int r = std::clamp(hr + step(rng), 0, cfg_.grid_rows - 1);
    const int c = std::clamp(hc + step(rng), 0, cfg_.grid_cols - 1);
    return r * cfg_.grid_cols + c;
  }

  static int cell_at(const std::vector<Block>& blocks, int hour) {
    const std::int64_t t = hour * 3600 + 1800;
    int cell = blocks.front().cell;
    for (const Block& b : blocks) {
      if (b.start_s <= t) cell = b.cell;
    }
    return cell;
  }

  void write_traj_header() {
    traj_ << "user_id,district_id,lac_id,cell_id,lat,lng,timestamp\n";
  }

  void write_day_records(int agent, std::int64_t day,
                         const std::vector<Block>& blocks) {
    const std::int64_t midnight = day_start(day, cfg_.utc_offset_s);
    for (const Block& b : blocks) {
      const std::string& key = world_.cell_keys[std::size_t(b.cell)];
      const CellInfo& info = world_.cells.at(key);
      char buf[96];
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,", info.lat, info.lng);
      traj_ << 'u' << agent << ',' << key_as_columns(key) << buf
            << midnight + b.start_s << "\n";
      ++stats_.n_records;
    }
  }

  // cell_key "d|l|c" -> "d,l,c"
  static std::string key_as_columns(const std::string& key) {
    std::string out = key;
    for (char& ch : out) {
      if (ch == '|') ch = ',';
    }
    return out;
  }

  void write_registry() {
    reg_ << "user_id,label,confirmed_date,recovery_days\n";
    for (int a = 0; a < cfg_.n_agents; ++a) {
      const std::int64_t conf = confirmed_day_[std::size_t(a)];
      if (conf == kNever) {
        reg_ << 'u' << a << ",normal,,\n";
      } else {
        reg_ << 'u' << a << ",confirmed," << format_day(conf) << ",10\n";
      }
    }
  }

  const World& world_;
  const WorldConfig& cfg_;
  std::ostream& traj_;
  std::ostream& reg_;
  std::vector<std::int64_t> infection_day_;
  std::vector<std::int64_t> confirmed_day_;
  SimStats stats_;
};

}  // namespace

SimStats simulate(const World& world, std::ostream& trajectories,
                  std::ostream& registry) {
  world.config.validate();
  Simulation sim(world, trajectories, registry);
  return sim.run();
}

}  // namespace hires
