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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hires {

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Local midnight offset for day bucketing. Default UTC+08:00.
inline constexpr std::int64_t kDefaultUtcOffsetS = 8 * 3600;

/// One raw trajectory row: a subscriber entering a base station cell.
struct TrajectoryRecord {
  std::string user_id;
  std::string district_id;
  std::string lac_id;
  std::string cell_id;
  double lat = 0.0;
  double lng = 0.0;
  std::int64_t timestamp = 0;  // epoch seconds, UTC

  // Canonical cell identity: district|lac|cell.
  std::string cell_key() const {
    return district_id + "|" + lac_id + "|" + cell_id;
  }
};

/// A contiguous stay of one user at one cell.
struct DwellSegment {
  std::string user_id;
  std::string cell_key;
  double lat = 0.0;
  double lng = 0.0;
  std::int64_t start = 0;  // epoch seconds, inclusive
  std::int64_t end = 0;    // epoch seconds, exclusive

  std::int64_t dwell_s() const { return end - start; }
};

enum class CaseLabel { kConfirmed, kNormal };

struct CaseEntry {
  std::string user_id;
  CaseLabel label = CaseLabel::kNormal;
  std::optional<std::int64_t> confirmed_day;  // local day index
  int recovery_days = 10;
};

/// Confirmed/normal labels keyed by user id.
class CaseRegistry {
 public:
  CaseRegistry() = default;
  explicit CaseRegistry(std::vector<CaseEntry> entries);

  const CaseEntry* find(const std::string& user_id) const;
  bool is_confirmed(const std::string& user_id) const;

  // Entries sorted by user id.
  const std::vector<CaseEntry>& entries() const { return entries_; }
  std::vector<const CaseEntry*> confirmed() const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<CaseEntry> entries_;  // sorted by user_id
};

struct CellInfo {
  double lat = 0.0;
  double lng = 0.0;
};

/// Coordinates of every cell seen in a corpus, keyed by cell_key.
using CellTable = std::map<std::string, CellInfo>;

// Day bucketing: local day index of an epoch timestamp under a fixed
// UTC offset. Day 0 is 1970-01-01 local.
std::int64_t day_index(std::int64_t timestamp, std::int64_t utc_offset_s);

// Epoch seconds of local midnight opening day `day`.
std::int64_t day_start(std::int64_t day, std::int64_t utc_offset_s);

// "YYYY-MM-DD" <-> local day index (proleptic Gregorian).
std::int64_t parse_day(std::string_view yyyy_mm_dd);
std::string format_day(std::int64_t day);

}  // namespace hires
