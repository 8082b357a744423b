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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hires/types.hpp"

namespace hires {

/// Declared column order of a trajectory file. The header must match.
struct TrajectorySchema {
  std::vector<std::string> columns = {"user_id", "district_id", "lac_id",
                                      "cell_id", "lat",         "lng",
                                      "timestamp"};
};

struct ParseStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Parsed corpus: records grouped by user (users sorted by id), each
/// user's records sorted ascending by timestamp.
struct TrajectoryData {
  std::vector<std::vector<TrajectoryRecord>> users;
  CellTable cells;
  ParseStats stats;

  std::int64_t min_timestamp = 0;
  std::int64_t max_timestamp = 0;
};

TrajectoryData parse_trajectories(std::istream& in,
                                  const TrajectorySchema& schema = {});

void write_trajectories(std::ostream& out,
                        std::span<const TrajectoryRecord> records,
                        const TrajectorySchema& schema = {});

// Registry file: "user_id,label,confirmed_date,recovery_days" with the
// confirmed_date empty for normal users and recovery_days optional.
CaseRegistry parse_registry(std::istream& in, int default_recovery_days = 10);
void write_registry(std::ostream& out, const CaseRegistry& registry);

struct ObservationWindow {
  std::int64_t start = 0;  // epoch seconds
  std::int64_t end = 0;    // exclusive
};

/// Dwell segments of one user by adjacent-record differencing. The last
/// record dwells min(terminal_dwell_s, time to window end). Consecutive
/// records in the same cell merge; zero-length segments are dropped.
std::vector<DwellSegment> build_dwell_segments(
    std::span<const TrajectoryRecord> records, ObservationWindow window,
    std::int64_t terminal_dwell_s = 3600);

/// Splits segments at local midnights so per-day dwell is exact.
std::vector<DwellSegment> split_at_day_boundaries(
    std::vector<DwellSegment> segments,
    std::int64_t utc_offset_s = kDefaultUtcOffsetS);

/// Great-circle distance in meters, Earth radius 6371000 m.
double haversine_m(double lat1, double lng1, double lat2, double lng2);

}  // namespace hires
