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
#include <vector>

#include "hires/riskfield.hpp"
#include "hires/types.hpp"

namespace hires {

enum class WindowReducer { kMax, kSum, kMean };

struct ScoreParams {
  DecayParams decay;
  int window_days = 14;  // T: trailing window is T+1 days
  WindowReducer reducer = WindowReducer::kMax;
  bool leave_one_out = false;
};

struct PersonScoreSeries {
  std::string user_id;
  std::int64_t first_day = 0;
  std::vector<double> base;    // y_p, one per day from first_day
  std::vector<double> window;  // reduced trailing-window score
  bool missing_trajectory = false;

  double base_on(std::int64_t day) const;
  double window_on(std::int64_t day) const;
};

/// Daily base score of one user: sum over window ages i of
/// viral_weights[i] * sum_cells f_p(cell, day-i) * riskmap(cell, day-i).
double daily_score(const StayFractionTable& table, const std::string& user_id,
                   const std::map<std::int64_t, RiskMap>& maps,
                   std::span<const double> viral_weights, std::int64_t day);

/// Trailing-window reduction (default max) over the last
/// min(window_days+1, available) entries.
std::vector<double> windowed_score(std::span<const double> daily,
                                   int window_days,
                                   WindowReducer reducer = WindowReducer::kMax);

/// Scores for every listed user over [first_day, last_day]. With
/// leave_one_out set, a confirmed user's own field contribution is
/// subtracted from the maps before scoring them.
std::vector<PersonScoreSeries> score_cohort(
    std::span<const std::string> user_ids, const StayFractionTable& table,
    const CaseRegistry& registry, const RiskSeries& series,
    const ScoreParams& params, std::int64_t first_day, std::int64_t last_day);

// Persistence: "user_id,day,base_score,window_score", day as YYYY-MM-DD.
void write_scores(std::ostream& out,
                  std::span<const PersonScoreSeries> scores);
std::vector<PersonScoreSeries> read_scores(std::istream& in);

}  // namespace hires
