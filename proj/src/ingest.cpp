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

#include "hires/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace hires {
namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_i64(std::string_view s, std::int64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

TrajectoryData parse_trajectories(std::istream& in,
                                  const TrajectorySchema& schema) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("trajectory input is empty (missing header)");
  }
  strip_cr(line);
  auto header = split_csv(line);
  if (header.size() != schema.columns.size()) {
    throw std::runtime_error("trajectory header does not match schema");
  }
  std::unordered_map<std::string_view, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != schema.columns[i]) {
      throw std::runtime_error("trajectory header does not match schema at "
                               "column " + std::to_string(i));
    }
    col[header[i]] = i;
  }
  for (const char* required : {"user_id", "district_id", "lac_id", "cell_id",
                               "lat", "lng", "timestamp"}) {
    if (!col.count(required)) {
      throw std::runtime_error(std::string("schema lacks column ") + required);
    }
  }
  const std::size_t c_user = col["user_id"], c_district = col["district_id"],
                    c_lac = col["lac_id"], c_cell = col["cell_id"],
                    c_lat = col["lat"], c_lng = col["lng"],
                    c_ts = col["timestamp"];

  TrajectoryData data;
  std::unordered_map<std::string, std::size_t> user_slot;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != schema.columns.size()) {
      ++data.stats.rejected;
      continue;
    }
    TrajectoryRecord r;
    if (!parse_double(f[c_lat], r.lat) || !parse_double(f[c_lng], r.lng) ||
        !parse_i64(f[c_ts], r.timestamp)) {
      ++data.stats.rejected;
      continue;
    }
    if (r.lat < -90.0 || r.lat > 90.0 || r.lng < -180.0 || r.lng > 180.0 ||
        r.timestamp < 0) {
      ++data.stats.rejected;
      continue;
    }
    r.user_id = std::string(f[c_user]);
    r.district_id = std::string(f[c_district]);
    r.lac_id = std::string(f[c_lac]);
    r.cell_id = std::string(f[c_cell]);
    if (r.user_id.empty()) {
      ++data.stats.rejected;
      continue;
    }
    auto [it, inserted] = user_slot.emplace(r.user_id, data.users.size());
    if (inserted) data.users.emplace_back();
    if (data.stats.accepted == 0) {
      data.min_timestamp = data.max_timestamp = r.timestamp;
    } else {
      data.min_timestamp = std::min(data.min_timestamp, r.timestamp);
      data.max_timestamp = std::max(data.max_timestamp, r.timestamp);
    }
    data.cells.emplace(r.cell_key(), CellInfo{r.lat, r.lng});
    data.users[it->second].push_back(std::move(r));
    ++data.stats.accepted;
  }
  std::sort(data.users.begin(), data.users.end(),
            [](const auto& a, const auto& b) {
              return a.front().user_id < b.front().user_id;
            });
  for (auto& records : data.users) {
    std::stable_sort(records.begin(), records.end(),
                     [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
  }
  return data;
}

void write_trajectories(std::ostream& out,
                        std::span<const TrajectoryRecord> records,
                        const TrajectorySchema& schema) {
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    out << (i ? "," : "") << schema.columns[i];
  }
  out << "\n";
  char buf[64];
  for (const TrajectoryRecord& r : records) {
    out << r.user_id << ',' << r.district_id << ',' << r.lac_id << ','
        << r.cell_id << ',';
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", r.lat, r.lng);
    out << buf << r.timestamp << "\n";
  }
}

CaseRegistry parse_registry(std::istream& in, int default_recovery_days) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("registry input is empty (missing header)");
  }
  strip_cr(line);
  if (line != "user_id,label,confirmed_date,recovery_days" &&
      line != "user_id,label,confirmed_date") {
    throw std::runtime_error("registry header does not match schema");
  }
  std::vector<CaseEntry> entries;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 3 && f.size() != 4) {
      throw std::runtime_error("malformed registry row: " + line);
    }
    CaseEntry e;
    e.user_id = std::string(f[0]);
    if (f[1] == "confirmed") {
      e.label = CaseLabel::kConfirmed;
    } else if (f[1] == "normal") {
      e.label = CaseLabel::kNormal;
    } else {
      throw std::runtime_error("unknown label in registry: " +
                               std::string(f[1]));
    }
    if (!f[2].empty()) e.confirmed_day = parse_day(f[2]);
    e.recovery_days = default_recovery_days;
    if (f.size() == 4 && !f[3].empty()) {
      std::int64_t rec = 0;
      if (!parse_i64(f[3], rec) || rec <= 0) {
        throw std::runtime_error("bad recovery_days in registry: " + line);
      }
      e.recovery_days = int(rec);
    }
    entries.push_back(std::move(e));
  }
  return CaseRegistry(std::move(entries));
}

void write_registry(std::ostream& out, const CaseRegistry& registry) {
  out << "user_id,label,confirmed_date,recovery_days\n";
  for (const CaseEntry& e : registry.entries()) {
    out << e.user_id << ','
        << (e.label == CaseLabel::kConfirmed ? "confirmed" : "normal") << ','
        << (e.confirmed_day ? format_day(*e.confirmed_day) : "") << ','
        << e.recovery_days << "\n";
  }
}

std::vector<DwellSegment> build_dwell_segments(
    std::span<const TrajectoryRecord> records, ObservationWindow window,
    std::int64_t terminal_dwell_s) {
  std::vector<DwellSegment> out;
  if (records.empty()) return out;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    if (records[i].timestamp > records[i + 1].timestamp) {
      throw std::invalid_argument("records must be sorted by timestamp");
    }
  }
  auto emit = [&](const TrajectoryRecord& r, std::int64_t start,
                  std::int64_t end) {
    start = std::max(start, window.start);
    end = std::min(end, window.end);
    if (end <= start) return;
    std::string key = r.cell_key();
    if (!out.empty() && out.back().cell_key == key &&
        out.back().end == start) {
      out.back().end = end;  // same cell, contiguous
      return;
    }
    out.push_back(DwellSegment{r.user_id, std::move(key), r.lat, r.lng, start,
                               end});
  };
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    emit(records[i], records[i].timestamp, records[i + 1].timestamp);
  }
  const TrajectoryRecord& last = records.back();
  emit(last, last.timestamp,
       std::min(last.timestamp + terminal_dwell_s, window.end));
  return out;
}

std::vector<DwellSegment> split_at_day_boundaries(
    std::vector<DwellSegment> segments, std::int64_t utc_offset_s) {
  std::vector<DwellSegment> out;
  out.reserve(segments.size());
  for (DwellSegment& s : segments) {
    std::int64_t d = day_index(s.start, utc_offset_s);
    while (day_start(d + 1, utc_offset_s) < s.end) {
      DwellSegment head = s;
      head.end = day_start(d + 1, utc_offset_s);
      s.start = head.end;
      out.push_back(std::move(head));
      ++d;
    }
    out.push_back(std::move(s));
  }
  return out;
}

double haversine_m(double lat1, double lng1, double lat2, double lng2) {
  constexpr double kEarthRadiusM = 6371000.0;
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const double phi1 = lat1 * kDegToRad;
  const double phi2 = lat2 * kDegToRad;
  const double dphi = (lat2 - lat1) * kDegToRad;
  const double dlam = (lng2 - lng1) * kDegToRad;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) *
                       std::sin(dlam / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace hires
