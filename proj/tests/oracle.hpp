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

// Independent nested-loop evaluation of the risk-field and scoring
// formulas, used as a test oracle. Deliberately naive: plain loops over
// flat structures, no sharing with the library implementation.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Stay {
  std::string user;
  std::string cell;
  std::int64_t day;
  double fraction;
};

struct Case {
  std::string user;
  std::int64_t confirmed_day;
  int recovery_days;
};

struct Params {
  int incubation_days = 14;
  std::vector<double> outdoor = {200.0, 100.0, 50.0};
  std::vector<double> viral = {1.0, 0.1, 0.01};
};

inline double delta(int s, int T) {
  if (s < 1 || s > T) return 0.0;
  return std::exp(-1.0 / double(T + 1 - s));
}

// F(cell, day) = sum over cases of delta(confirmed - day) * fraction
inline std::map<std::string, double> base_field(
    const std::vector<Stay>& stays, const std::vector<Case>& cases,
    const Params& p, std::int64_t day) {
  std::map<std::string, double> field;
  for (const Case& c : cases) {
    if (day >= c.confirmed_day + c.recovery_days) continue;
    const double d = delta(int(c.confirmed_day - day), p.incubation_days);
    if (d == 0.0) continue;
    for (const Stay& s : stays) {
      if (s.user == c.user && s.day == day) {
        field[s.cell] += d * s.fraction;
      }
    }
  }
  return field;
}

// F_bar(cell, day) = sum_i outdoor[i] * F(cell, day - i)
inline std::map<std::string, double> aggregated_field(
    const std::vector<Stay>& stays, const std::vector<Case>& cases,
    const Params& p, std::int64_t day) {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < p.outdoor.size(); ++i) {
    auto f = base_field(stays, cases, p, day - std::int64_t(i));
    for (const auto& [cell, v] : f) out[cell] += p.outdoor[i] * v;
  }
  return out;
}

// y_p(day) = sum_i viral[i] * sum_cell f_p(cell, day-i) * F_bar(cell, day-i)
inline double personal_score(const std::vector<Stay>& stays,
                             const std::vector<Case>& cases, const Params& p,
                             const std::string& user, std::int64_t day) {
  double y = 0.0;
  for (std::size_t i = 0; i < p.viral.size(); ++i) {
    const std::int64_t d = day - std::int64_t(i);
    auto fbar = aggregated_field(stays, cases, p, d);
    double dot = 0.0;
    for (const Stay& s : stays) {
      if (s.user == user && s.day == d) {
        auto it = fbar.find(s.cell);
        if (it != fbar.end()) dot += s.fraction * it->second;
      }
    }
    y += p.viral[i] * dot;
  }
  return y;
}

// stay fractions by direct dwell bucketing (seconds per day per cell)
inline std::vector<Stay> fractions_from_dwell(
    const std::vector<std::tuple<std::string, std::string, std::int64_t,
                                 double>>& user_cell_day_seconds) {
  std::map<std::pair<std::string, std::int64_t>, double> totals;
  for (const auto& [user, cell, day, secs] : user_cell_day_seconds) {
    totals[{user, day}] += secs;
  }
  std::vector<Stay> stays;
  for (const auto& [user, cell, day, secs] : user_cell_day_seconds) {
    stays.push_back({user, cell, day, secs / totals[{user, day}]});
  }
  return stays;
}

}  // namespace oracle
