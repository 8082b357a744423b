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

#include "hires/score.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hires {
namespace {

double cell_risk(const RiskMap& map, const std::string& cell) {
  auto it = map.cells.find(cell);
  return it == map.cells.end() ? 0.0 : it->second.risk;
}

// Confirmed user's own contribution to the aggregated field at
// (cell, day): sum over ages j of outdoor_weights[j] * delta * fraction.
double own_aggregate(const StayFractionTable& table, const CaseEntry& entry,
                     const DecayParams& decay, const std::string& cell,
                     std::int64_t day) {
  double total = 0.0;
  for (std::size_t j = 0; j < decay.outdoor_weights.size(); ++j) {
    const std::int64_t d = day - std::int64_t(j);
    const int s = int(*entry.confirmed_day - d);
    double delta;
    if (s == 0 && decay.include_diagnosis_day) {
      delta = std::exp(-1.0 / double(decay.incubation_days + 1));
    } else {
      delta = incubation_decay(s, decay.incubation_days);
    }
    if (delta == 0.0) continue;
    if (d >= *entry.confirmed_day + entry.recovery_days) continue;
    const auto* fractions = table.find(entry.user_id, d);
    if (fractions == nullptr) continue;
    auto it = std::lower_bound(
        fractions->begin(), fractions->end(), cell,
        [](const auto& a, const std::string& k) { return a.first < k; });
    if (it != fractions->end() && it->first == cell) {
      total += decay.outdoor_weights[j] * delta * it->second;
    }
  }
  return total;
}

double daily_score_impl(const StayFractionTable& table,
                        const std::string& user_id,
                        const std::map<std::int64_t, RiskMap>& maps,
                        std::span<const double> viral_weights,
                        std::int64_t day, const CaseEntry* exclude_self,
                        const DecayParams* decay) {
  double score = 0.0;
  for (std::size_t i = 0; i < viral_weights.size(); ++i) {
    const std::int64_t d = day - std::int64_t(i);
    auto mit = maps.find(d);
    if (mit == maps.end()) continue;
    const auto* fractions = table.find(user_id, d);
    if (fractions == nullptr) continue;
    double dot = 0.0;
    for (const auto& [cell, f] : *fractions) {
      double risk = cell_risk(mit->second, cell);
      if (exclude_self != nullptr) {
        risk -= own_aggregate(table, *exclude_self, *decay, cell, d);
      }
      dot += f * risk;
    }
    score += viral_weights[i] * dot;
  }
  return score;
}

}  // namespace

double PersonScoreSeries::base_on(std::int64_t day) const {
  const std::int64_t i = day - first_day;
  if (i < 0 || i >= std::int64_t(base.size())) return 0.0;
  return base[i];
}

double PersonScoreSeries::window_on(std::int64_t day) const {
  const std::int64_t i = day - first_day;
  if (i < 0 || i >= std::int64_t(window.size())) return 0.0;
  return window[i];
}

double daily_score(const StayFractionTable& table, const std::string& user_id,
                   const std::map<std::int64_t, RiskMap>& maps,
                   std::span<const double> viral_weights, std::int64_t day) {
  return daily_score_impl(table, user_id, maps, viral_weights, day, nullptr,
                          nullptr);
}

std::vector<double> windowed_score(std::span<const double> daily,
                                   int window_days, WindowReducer reducer) {
  if (window_days < 0) throw std::invalid_argument("window_days must be >= 0");
  std::vector<double> out(daily.size(), 0.0);
  for (std::size_t k = 0; k < daily.size(); ++k) {
    const std::size_t lo =
        k >= std::size_t(window_days) ? k - std::size_t(window_days) : 0;
    double acc = daily[lo];
    std::size_t n = 1;
    for (std::size_t j = lo + 1; j <= k; ++j, ++n) {
      if (reducer == WindowReducer::kMax) {
        acc = std::max(acc, daily[j]);
      } else {
        acc += daily[j];
      }
    }
    out[k] = reducer == WindowReducer::kMean ? acc / double(n) : acc;
  }
  return out;
}

std::vector<PersonScoreSeries> score_cohort(
    std::span<const std::string> user_ids, const StayFractionTable& table,
    const CaseRegistry& registry, const RiskSeries& series,
    const ScoreParams& params, std::int64_t first_day, std::int64_t last_day) {
  if (last_day < first_day) {
    throw std::invalid_argument("empty scoring day range");
  }
  std::vector<std::string> sorted_ids(user_ids.begin(), user_ids.end());
  std::sort(sorted_ids.begin(), sorted_ids.end());
  std::vector<PersonScoreSeries> out;
  out.reserve(sorted_ids.size());
  for (const std::string& user : sorted_ids) {
    PersonScoreSeries s;
    s.user_id = user;
    s.first_day = first_day;
    const CaseEntry* self = nullptr;
    if (params.leave_one_out) {
      const CaseEntry* e = registry.find(user);
      if (e != nullptr && e->label == CaseLabel::kConfirmed) self = e;
    }
    bool any_data = false;
    for (std::int64_t d = first_day; d <= last_day; ++d) {
      if (table.find(user, d) != nullptr) any_data = true;
      s.base.push_back(daily_score_impl(table, user, series.maps,
                                        params.decay.viral_weights, d, self,
                                        &params.decay));
    }
    s.missing_trajectory = !any_data;
    s.window = windowed_score(s.base, params.window_days, params.reducer);
    out.push_back(std::move(s));
  }
  return out;
}

void write_scores(std::ostream& out,
                  std::span<const PersonScoreSeries> scores) {
  out << "user_id,day,base_score,window_score\n";
  char buf[64];
  for (const PersonScoreSeries& s : scores) {
    for (std::size_t i = 0; i < s.base.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", s.base[i], s.window[i]);
      out << s.user_id << ',' << format_day(s.first_day + std::int64_t(i))
          << ',' << buf << "\n";
    }
  }
}

std::vector<PersonScoreSeries> read_scores(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("score input is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "user_id,day,base_score,window_score") {
    throw std::runtime_error("score header does not match schema");
  }
  std::vector<PersonScoreSeries> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.find(',', c1 + 1);
    const std::size_t c3 = line.find(',', c2 + 1);
    if (c3 == std::string::npos) {
      throw std::runtime_error("malformed score row: " + line);
    }
    const std::string user = line.substr(0, c1);
    const std::int64_t day = parse_day(
        std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
    double base = 0.0, window = 0.0;
    auto num = [&](std::size_t b, std::size_t e, double& v) {
      auto [p, ec] = std::from_chars(line.data() + b, line.data() + e, v);
      if (ec != std::errc() || p != line.data() + e) {
        throw std::runtime_error("malformed score row: " + line);
      }
    };
    num(c2 + 1, c3, base);
    num(c3 + 1, line.size(), window);
    if (out.empty() || out.back().user_id != user) {
      PersonScoreSeries s;
      s.user_id = user;
      s.first_day = day;
      out.push_back(std::move(s));
    }
    if (out.back().first_day + std::int64_t(out.back().base.size()) != day) {
      throw std::runtime_error("score rows for one user must be contiguous");
    }
    out.back().base.push_back(base);
    out.back().window.push_back(window);
  }
  return out;
}

}  // namespace hires
