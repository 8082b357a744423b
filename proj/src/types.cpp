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

#include "hires/types.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <stdexcept>

namespace hires {

CaseRegistry::CaseRegistry(std::vector<CaseEntry> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const CaseEntry& a, const CaseEntry& b) {
              return a.user_id < b.user_id;
            });
  for (const CaseEntry& e : entries_) {
    if (e.label == CaseLabel::kConfirmed && !e.confirmed_day) {
      throw std::invalid_argument("confirmed entry without confirmed date: " +
                                  e.user_id);
    }
    if (e.label == CaseLabel::kNormal && e.confirmed_day) {
      throw std::invalid_argument("normal entry carries a confirmed date: " +
                                  e.user_id);
    }
    if (e.recovery_days <= 0) {
      throw std::invalid_argument("recovery_days must be positive: " +
                                  e.user_id);
    }
  }
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i - 1].user_id == entries_[i].user_id) {
      throw std::invalid_argument("duplicate registry entry: " +
                                  entries_[i].user_id);
    }
  }
}

const CaseEntry* CaseRegistry::find(const std::string& user_id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), user_id,
                             [](const CaseEntry& e, const std::string& id) {
                               return e.user_id < id;
                             });
  if (it == entries_.end() || it->user_id != user_id) return nullptr;
  return &*it;
}

bool CaseRegistry::is_confirmed(const std::string& user_id) const {
  const CaseEntry* e = find(user_id);
  return e != nullptr && e->label == CaseLabel::kConfirmed;
}

std::vector<const CaseEntry*> CaseRegistry::confirmed() const {
  std::vector<const CaseEntry*> out;
  for (const CaseEntry& e : entries_) {
    if (e.label == CaseLabel::kConfirmed) out.push_back(&e);
  }
  return out;
}

std::int64_t day_index(std::int64_t timestamp, std::int64_t utc_offset_s) {
  std::int64_t shifted = timestamp + utc_offset_s;
  // floor division for pre-1970 inputs
  std::int64_t d = shifted / kSecondsPerDay;
  if (shifted % kSecondsPerDay < 0) --d;
  return d;
}

std::int64_t day_start(std::int64_t day, std::int64_t utc_offset_s) {
  return day * kSecondsPerDay - utc_offset_s;
}

std::int64_t parse_day(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
    throw std::invalid_argument("bad date (expect YYYY-MM-DD): " +
                                std::string(s));
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc() || p != s.data() + pos + len) {
      throw std::invalid_argument("bad date: " + std::string(s));
    }
    return v;
  };
  std::chrono::year_month_day ymd{std::chrono::year{num(0, 4)},
                                  std::chrono::month{unsigned(num(5, 2))},
                                  std::chrono::day{unsigned(num(8, 2))}};
  if (!ymd.ok()) throw std::invalid_argument("invalid date: " + std::string(s));
  return std::chrono::sys_days(ymd).time_since_epoch().count();
}

std::string format_day(std::int64_t day) {
  std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

}  // namespace hires
