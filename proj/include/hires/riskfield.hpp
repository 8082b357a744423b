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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hires/types.hpp"

namespace hires {

struct DecayParams {
  int incubation_days = 14;  // T
  // i-days-old weights; both strictly decreasing in i.
  std::vector<double> outdoor_weights = {200.0, 100.0, 50.0};  // field
  std::vector<double> viral_weights = {1.0, 0.1, 0.01};        // score
  int recovery_days = 10;
  // When set, a case still contributes on its diagnosis day with weight
  // exp(-1/(T+1)).
  bool include_diagnosis_day = false;

  void validate() const;
};

/// Incubation decay: exp(-1/(T+1-s)) for 1 <= s <= T, else 0.
double incubation_decay(int s, int incubation_days);

/// Whole days from `day` to the case's confirmed date. Throws for a
/// non-confirmed entry.
int days_to_diagnosis(const CaseEntry& entry, std::int64_t day);

/// Per-day stay fractions: day -> user -> (cell, fraction) sorted by
/// cell key, fractions summing to 1 per (user, day).
class StayFractionTable {
 public:
  using CellFractions = std::vector<std::pair<std::string, double>>;

  static StayFractionTable build(std::span<const DwellSegment> day_split_segs,
                                 std::int64_t utc_offset_s = kDefaultUtcOffsetS);

  const CellFractions* find(const std::string& user_id,
                            std::int64_t day) const;
  const std::map<std::string, CellFractions>* day(std::int64_t day) const;

  std::map<std::int64_t, std::map<std::string, CellFractions>>& days() {
    return days_;
  }
  const std::map<std::int64_t, std::map<std::string, CellFractions>>& days()
      const {
    return days_;
  }

 private:
  std::map<std::int64_t, std::map<std::string, CellFractions>> days_;
};

/// Cases still contributing on `day`: excluded once
/// day >= confirmed_day + recovery_days.
std::vector<const CaseEntry*> apply_recovery(const CaseRegistry& registry,
                                             std::int64_t day);

using CellField = std::map<std::string, double>;

/// Base function F(cell, day): sum over active confirmed cases of
/// incubation decay times stay fraction, accumulated in case-id order.
/// With n_threads > 1 per-case contributions are computed in parallel
/// and merged in the same canonical order, so results are bitwise equal.
CellField base_field(const StayFractionTable& table,
                     const CaseRegistry& registry, const DecayParams& params,
                     std::int64_t day, int n_threads = 1);

struct RiskMap {
  struct Cell {
    double lat = 0.0;
    double lng = 0.0;
    double risk = 0.0;
  };
  std::int64_t day = 0;
  std::map<std::string, Cell> cells;
};

/// Aggregated field for one day: sum of outdoor_weights[i] times the
/// base field of day-i. Fields are ordered most recent first; missing
/// entries count as zero.
RiskMap aggregate_field(std::span<const CellField* const> fields_by_age,
                        std::span<const double> outdoor_weights,
                        const CellTable& cells, std::int64_t day);

/// Base fields and aggregated risk maps for [first_day, last_day].
struct RiskSeries {
  std::map<std::int64_t, CellField> base;
  std::map<std::int64_t, RiskMap> maps;
};
RiskSeries compute_risk_series(const StayFractionTable& table,
                               const CaseRegistry& registry,
                               const DecayParams& params,
                               std::int64_t first_day, std::int64_t last_day,
                               const CellTable& cells, int n_threads = 1);

/// Sum of risk over cells within radius_m of (lat, lng).
double region_risk(const RiskMap& map, double lat, double lng,
                   double radius_m);

// Persistence: "cell_key,lat,lng,risk" with header, rows in key order.
void write_risk_map(std::ostream& out, const RiskMap& map);
RiskMap read_risk_map(std::istream& in, std::int64_t day);

}  // namespace hires
