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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hires/types.hpp"

namespace hires {

struct WorldConfig {
  int grid_rows = 96;
  int grid_cols = 96;
  double cell_spacing_m = 800.0;
  double origin_lat = 30.5;
  double origin_lng = 114.0;
  int n_agents = 20000;
  int n_days = 28;
  std::int64_t start_day = 18262;  // 2020-01-01
  double infection_rate = 0.03;
  int diagnosis_lag_min_days = 2;
  int diagnosis_lag_max_days = 14;
  double hazard_per_hour = 5e-5;  // infection hazard per co-located hour
  std::uint64_t rng_seed = 20200101;
  std::int64_t utc_offset_s = kDefaultUtcOffsetS;

  void validate() const;
};

/// Daily rhythm of one agent; exact block boundaries get per-day jitter.
struct AgentProfile {
  int home_cell = 0;
  int work_cell = 0;
  bool commutes = true;
  double errand_prob = 0.5;
};

struct World {
  WorldConfig config;
  std::vector<std::string> cell_keys;  // by cell index (row-major)
  CellTable cells;
  std::vector<AgentProfile> agents;
};

/// Grid of cells plus agent home/work assignments; deterministic under
/// the config seed.
World generate_world(const WorldConfig& config);

struct SimStats {
  std::size_t n_records = 0;
  std::size_t n_infected = 0;  // seeded + secondary
};

/// Runs the day loop and streams trajectory and registry files in the
/// ingest formats. Seeds ceil(rate * n_agents) index infections; each
/// day a susceptible agent is infected with probability
/// 1 - exp(-hazard * co-located hours with infectious agents), and gets
/// a confirmed date infection day + diagnosis lag. Diagnosed agents
/// isolate at home.
SimStats simulate(const World& world, std::ostream& trajectories,
                  std::ostream& registry);

}  // namespace hires
