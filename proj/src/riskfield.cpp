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

#include "hires/riskfield.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hires/ingest.hpp"

namespace hires {

void DecayParams::validate() const {
  if (incubation_days < 1) {
    throw std::invalid_argument("incubation_days must be >= 1");
  }
  if (recovery_days < 1) {
    throw std::invalid_argument("recovery_days must be >= 1");
  }
  for (const auto* w : {&outdoor_weights, &viral_weights}) {
    if (w->empty()) throw std::invalid_argument("decay weights empty");
    for (std::size_t i = 0; i < w->size(); ++i) {
      if ((*w)[i] <= 0.0) {
        throw std::invalid_argument("decay weights must be positive");
      }
      if (i > 0 && (*w)[i] >= (*w)[i - 1]) {
        throw std::invalid_argument("decay weights must be strictly "
                                    "decreasing");
      }
    }
  }
}

double incubation_decay(int s, int incubation_days) {
  if (s < 1 || s > incubation_days) return 0.0;
  return std::exp(-1.0 / double(incubation_days + 1 - s));
}

int days_to_diagnosis(const CaseEntry& entry, std::int64_t day) {
  if (entry.label != CaseLabel::kConfirmed || !entry.confirmed_day) {
    throw std::invalid_argument("days_to_diagnosis on non-confirmed entry: " +
                                entry.user_id);
  }
  return int(*entry.confirmed_day - day);
}

StayFractionTable StayFractionTable::build(
    std::span<const DwellSegment> segs, std::int64_t utc_offset_s) {
  StayFractionTable table;
  // dwell sums; segments are already split at midnight so each segment
  // belongs to exactly one day
  for (const DwellSegment& s : segs) {
    const std::int64_t d = day_index(s.start, utc_offset_s);
    if (day_index(s.end - 1, utc_offset_s) != d) {
      throw std::invalid_argument(
          "segment crosses a day boundary; split segments first");
    }
    auto& cells = table.days_[d][s.user_id];
    auto it = std::lower_bound(
        cells.begin(), cells.end(), s.cell_key,
        [](const auto& a, const std::string& k) { return a.first < k; });
    if (it != cells.end() && it->first == s.cell_key) {
      it->second += double(s.dwell_s());
    } else {
      cells.insert(it, {s.cell_key, double(s.dwell_s())});
    }
  }
  for (auto& [d, users] : table.days_) {
    for (auto& [user, cells] : users) {
      double total = 0.0;
      for (const auto& [cell, dwell] : cells) total += dwell;
      for (auto& [cell, dwell] : cells) dwell /= total;
    }
  }
  return table;
}

const StayFractionTable::CellFractions* StayFractionTable::find(
    const std::string& user_id, std::int64_t day) const {
  auto dit = days_.find(day);
  if (dit == days_.end()) return nullptr;
  auto uit = dit->second.find(user_id);
  if (uit == dit->second.end()) return nullptr;
  return &uit->second;
}

const std::map<std::string, StayFractionTable::CellFractions>*
StayFractionTable::day(std::int64_t day) const {
  auto it = days_.find(day);
  return it == days_.end() ? nullptr : &it->second;
}

std::vector<const CaseEntry*> apply_recovery(const CaseRegistry& registry,
                                             std::int64_t day) {
  std::vector<const CaseEntry*> active;
  for (const CaseEntry* e : registry.confirmed()) {
    if (day < *e->confirmed_day + e->recovery_days) active.push_back(e);
  }
  return active;
}

namespace {

// One confirmed case's weighted fractions for one day, or empty.
void case_contribution(const StayFractionTable& table, const CaseEntry& e,
                       const DecayParams& params, std::int64_t day,
                       StayFractionTable::CellFractions& out) {
  out.clear();
  const int s = int(*e.confirmed_day - day);
  double delta;
  if (s == 0 && params.include_diagnosis_day) {
    delta = std::exp(-1.0 / double(params.incubation_days + 1));
  } else {
    delta = incubation_decay(s, params.incubation_days);
  }
  if (delta == 0.0) return;
  const auto* fractions = table.find(e.user_id, day);
  if (fractions == nullptr) return;
  out.reserve(fractions->size());
  for (const auto& [cell, f] : *fractions) out.emplace_back(cell, delta * f);
}

}  // namespace

CellField base_field(const StayFractionTable& table,
                     const CaseRegistry& registry, const DecayParams& params,
                     std::int64_t day, int n_threads) {
  params.validate();
  std::vector<const CaseEntry*> active = apply_recovery(registry, day);
  std::vector<StayFractionTable::CellFractions> contrib(active.size());
  if (n_threads <= 1 || active.size() < 2) {
    for (std::size_t i = 0; i < active.size(); ++i) {
      case_contribution(table, *active[i], params, day, contrib[i]);
    }
  } else {
    const std::size_t workers =
        std::min<std::size_t>(std::size_t(n_threads), active.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < active.size(); i += workers) {
          case_contribution(table, *active[i], params, day, contrib[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  // accumulate in case-id order (active is registry-sorted), then cell
  // order within each case: serial and parallel runs are bitwise equal
  CellField field;
  for (const auto& c : contrib) {
    for (const auto& [cell, v] : c) field[cell] += v;
  }
  return field;
}

RiskMap aggregate_field(std::span<const CellField* const> fields_by_age,
                        std::span<const double> outdoor_weights,
                        const CellTable& cells, std::int64_t day) {
  RiskMap map;
  map.day = day;
  const std::size_t w = std::min(fields_by_age.size(), outdoor_weights.size());
  for (std::size_t i = 0; i < w; ++i) {
    if (fields_by_age[i] == nullptr) continue;
    for (const auto& [cell, f] : *fields_by_age[i]) {
      auto [it, inserted] = map.cells.try_emplace(cell);
      if (inserted) {
        auto cit = cells.find(cell);
        if (cit != cells.end()) {
          it->second.lat = cit->second.lat;
          it->second.lng = cit->second.lng;
        }
      }
      it->second.risk += outdoor_weights[i] * f;
    }
  }
  return map;
}

RiskSeries compute_risk_series(const StayFractionTable& table,
                               const CaseRegistry& registry,
                               const DecayParams& params,
                               std::int64_t first_day, std::int64_t last_day,
                               const CellTable& cells, int n_threads) {
  params.validate();
  RiskSeries series;
  const std::int64_t window = std::int64_t(params.outdoor_weights.size());
  for (std::int64_t d = first_day - window + 1; d <= last_day; ++d) {
    series.base[d] = base_field(table, registry, params, d, n_threads);
  }
  for (std::int64_t d = first_day; d <= last_day; ++d) {
    std::vector<const CellField*> ages;
    for (std::int64_t i = 0; i < window; ++i) {
      auto it = series.base.find(d - i);
      ages.push_back(it == series.base.end() ? nullptr : &it->second);
    }
    series.maps[d] =
        aggregate_field(ages, params.outdoor_weights, cells, d);
  }
  return series;
}

double region_risk(const RiskMap& map, double lat, double lng,
                   double radius_m) {
  if (radius_m <= 0.0) throw std::invalid_argument("radius must be positive");
  double total = 0.0;
  for (const auto& [key, cell] : map.cells) {
    if (haversine_m(lat, lng, cell.lat, cell.lng) <= radius_m) {
      total += cell.risk;
    }
  }
  return total;
}

void write_risk_map(std::ostream& out, const RiskMap& map) {
  out << "cell_key,lat,lng,risk\n";
  char buf[96];
  for (const auto& [key, cell] : map.cells) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", cell.lat, cell.lng,
                  cell.risk);
    out << key << ',' << buf << "\n";
  }
}

RiskMap read_risk_map(std::istream& in, std::int64_t day) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("risk map input is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "cell_key,lat,lng,risk") {
    throw std::runtime_error("risk map header does not match schema");
  }
  RiskMap map;
  map.day = day;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t c3 = line.rfind(',');
    const std::size_t c2 = line.rfind(',', c3 - 1);
    const std::size_t c1 = line.rfind(',', c2 - 1);
    if (c1 == std::string::npos) {
      throw std::runtime_error("malformed risk map row: " + line);
    }
    RiskMap::Cell cell;
    auto num = [&](std::size_t b, std::size_t e, double& v) {
      auto [p, ec] = std::from_chars(line.data() + b, line.data() + e, v);
      if (ec != std::errc() || p != line.data() + e) {
        throw std::runtime_error("malformed risk map row: " + line);
      }
    };
    num(c1 + 1, c2, cell.lat);
    num(c2 + 1, c3, cell.lng);
    num(c3 + 1, line.size(), cell.risk);
    map.cells.emplace(line.substr(0, c1), cell);
  }
  return map;
}

}  // namespace hires
