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

#include <algorithm>
#include <random>
#include <sstream>

#include <doctest.h>

#include "hires/ingest.hpp"
#include "hires/riskfield.hpp"

using namespace hires;

namespace {

TrajectoryData parse(const std::string& text) {
  std::istringstream in(text);
  return parse_trajectories(in);
}

const std::string kHeader =
    "user_id,district_id,lac_id,cell_id,lat,lng,timestamp\n";

}  // namespace

TEST_CASE("parse_trajectories maps fields and cell key") {
  auto data = parse(kHeader + "u1,d1,l1,c1,30.5,114.3,1579000000\n");
  REQUIRE(data.users.size() == 1);
  const TrajectoryRecord& r = data.users[0][0];
  CHECK(r.user_id == "u1");
  CHECK(r.cell_key() == "d1|l1|c1");
  CHECK(r.lat == doctest::Approx(30.5));
  CHECK(r.lng == doctest::Approx(114.3));
  CHECK(r.timestamp == 1579000000);
  CHECK(data.stats.accepted == 1);
  CHECK(data.stats.rejected == 0);
}

TEST_CASE("parse_trajectories rejects out-of-range rows") {
  auto data = parse(kHeader + "u1,d,l,c,95,114.3,1579000000\n" +
                    "u1,d,l,c,30,114.3,notanumber\n" +
                    "u1,d,l,c,30,114.3,1579000001\n");
  CHECK(data.stats.rejected == 2);
  CHECK(data.stats.accepted == 1);
}

TEST_CASE("parse_trajectories sorts per-user records by timestamp") {
  auto data = parse(kHeader + "u1,d,l,c2,30,114,200\nu1,d,l,c1,30,114,100\n");
  REQUIRE(data.users[0].size() == 2);
  CHECK(data.users[0][0].timestamp == 100);
  CHECK(data.users[0][1].timestamp == 200);
}

TEST_CASE("parse_trajectories requires a matching header") {
  std::istringstream empty("");
  CHECK_THROWS(parse_trajectories(empty));
  std::istringstream wrong("a,b,c\nu1,d,l\n");
  CHECK_THROWS(parse_trajectories(wrong));
}

TEST_CASE("trajectory round-trip preserves records") {
  auto data = parse(kHeader +
                    "u1,d1,l1,c1,30.123456789,114.3,1579000000\n"
                    "u2,d2,l9,c4,-12.5,-77.25,1579000555\n"
                    "u1,d1,l1,c2,30.2,114.4,1579003600\n");
  std::vector<TrajectoryRecord> flat;
  for (const auto& u : data.users) flat.insert(flat.end(), u.begin(), u.end());
  std::ostringstream out;
  write_trajectories(out, flat);
  std::istringstream in(out.str());
  auto again = parse_trajectories(in);
  REQUIRE(again.users.size() == data.users.size());
  for (std::size_t u = 0; u < data.users.size(); ++u) {
    REQUIRE(again.users[u].size() == data.users[u].size());
    for (std::size_t i = 0; i < data.users[u].size(); ++i) {
      const auto& a = data.users[u][i];
      const auto& b = again.users[u][i];
      CHECK(a.user_id == b.user_id);
      CHECK(a.cell_key() == b.cell_key());
      CHECK(a.lat == b.lat);
      CHECK(a.lng == b.lng);
      CHECK(a.timestamp == b.timestamp);
    }
  }
}

TEST_CASE("build_dwell_segments adjacent differencing") {
  std::vector<TrajectoryRecord> recs = {
      {"u", "d", "l", "A", 30, 114, 0},
      {"u", "d", "l", "B", 30, 114, 600},
  };
  auto segs = build_dwell_segments(recs, {0, 100000});
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].cell_key == "d|l|A");
  CHECK(segs[0].start == 0);
  CHECK(segs[0].end == 600);
}

TEST_CASE("build_dwell_segments terminal dwell capped at window end") {
  std::vector<TrajectoryRecord> recs = {{"u", "d", "l", "A", 30, 114, 0}};
  auto segs = build_dwell_segments(recs, {0, 1800}, 3600);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].dwell_s() == 1800);
}

TEST_CASE("build_dwell_segments merges consecutive same-cell records") {
  std::vector<TrajectoryRecord> recs = {
      {"u", "d", "l", "A", 30, 114, 0},
      {"u", "d", "l", "A", 30, 114, 600},
      {"u", "d", "l", "B", 30, 114, 900},
  };
  auto segs = build_dwell_segments(recs, {0, 100000});
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].cell_key == "d|l|A");
  CHECK(segs[0].end == 900);
}

TEST_CASE("build_dwell_segments empty input") {
  CHECK(build_dwell_segments({}, {0, 100}).empty());
}

TEST_CASE("segment construction is order-invariant under shuffled rows") {
  std::vector<std::string> rows = {
      "u,d,l,A,30,114,0",    "u,d,l,B,30,114,700",
      "u,d,l,C,30,114,1500", "u,d,l,A,30,114,2600",
  };
  std::mt19937 rng(7);
  std::vector<DwellSegment> reference;
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(rows.begin(), rows.end(), rng);
    std::string text = kHeader;
    for (const auto& r : rows) text += r + "\n";
    auto data = parse(text);
    auto segs = build_dwell_segments(data.users[0], {0, 10000});
    if (trial == 0) {
      reference = segs;
      continue;
    }
    REQUIRE(segs.size() == reference.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].cell_key == reference[i].cell_key);
      CHECK(segs[i].start == reference[i].start);
      CHECK(segs[i].end == reference[i].end);
    }
  }
}

TEST_CASE("split_at_day_boundaries keeps per-day dwell exact") {
  // 2020-01-01 20:00 local to 2020-01-02 04:00 local (+08:00)
  const std::int64_t day = parse_day("2020-01-01");
  const std::int64_t start = day_start(day, kDefaultUtcOffsetS) + 20 * 3600;
  std::vector<DwellSegment> segs = {
      {"u", "A", 30, 114, start, start + 8 * 3600}};
  auto split = split_at_day_boundaries(std::move(segs));
  REQUIRE(split.size() == 2);
  CHECK(split[0].dwell_s() == 4 * 3600);
  CHECK(split[1].dwell_s() == 4 * 3600);
  CHECK(day_index(split[0].start, kDefaultUtcOffsetS) == day);
  CHECK(day_index(split[1].start, kDefaultUtcOffsetS) == day + 1);
}

TEST_CASE("dwell segments never overlap and daily dwell bounded") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<TrajectoryRecord> recs;
    std::int64_t t = std::uniform_int_distribution<std::int64_t>(
        0, 200000)(rng);
    const int n = std::uniform_int_distribution<int>(1, 40)(rng);
    for (int i = 0; i < n; ++i) {
      recs.push_back({"u", "d", "l",
                      "c" + std::to_string(rng() % 5), 30, 114, t});
      t += std::uniform_int_distribution<std::int64_t>(0, 30000)(rng);
    }
    auto segs = build_dwell_segments(recs, {0, t + 7200});
    for (std::size_t i = 1; i < segs.size(); ++i) {
      CHECK(segs[i].start >= segs[i - 1].end);
    }
    auto split = split_at_day_boundaries(std::move(segs));
    std::map<std::int64_t, std::int64_t> per_day;
    for (const auto& s : split) {
      CHECK(s.dwell_s() > 0);
      per_day[day_index(s.start, kDefaultUtcOffsetS)] += s.dwell_s();
    }
    for (const auto& [d, total] : per_day) CHECK(total <= kSecondsPerDay);
  }
}

TEST_CASE("haversine_m known distances") {
  CHECK(haversine_m(10, 20, 10, 20) == doctest::Approx(0.0));
  // quarter great circle
  CHECK(haversine_m(0, 0, 0, 90) ==
        doctest::Approx(2 * 3.14159265358979 * 6371000 / 4).epsilon(1e-6));
  // one degree of longitude at the equator
  CHECK(haversine_m(0, 0, 0, 1) == doctest::Approx(111194.93).epsilon(1e-4));
}

TEST_CASE("registry parse and invariants") {
  std::istringstream in(
      "user_id,label,confirmed_date,recovery_days\n"
      "u1,confirmed,2020-01-15,\n"
      "u2,normal,,\n"
      "u3,confirmed,2020-01-20,20\n");
  auto reg = parse_registry(in);
  CHECK(reg.size() == 3);
  CHECK(reg.is_confirmed("u1"));
  CHECK(!reg.is_confirmed("u2"));
  CHECK(*reg.find("u1")->confirmed_day == parse_day("2020-01-15"));
  CHECK(reg.find("u1")->recovery_days == 10);
  CHECK(reg.find("u3")->recovery_days == 20);

  std::istringstream bad1(
      "user_id,label,confirmed_date,recovery_days\nu1,confirmed,,\n");
  CHECK_THROWS(parse_registry(bad1));
  std::istringstream bad2(
      "user_id,label,confirmed_date,recovery_days\nu1,normal,2020-01-01,\n");
  CHECK_THROWS(parse_registry(bad2));
  std::ostringstream out;
  write_registry(out, reg);
  std::istringstream back(out.str());
  auto reg2 = parse_registry(back);
  CHECK(reg2.size() == reg.size());
}

TEST_CASE("date helpers round-trip") {
  CHECK(format_day(parse_day("2020-01-15")) == "2020-01-15");
  CHECK(parse_day("1970-01-01") == 0);
  CHECK_THROWS(parse_day("2020-13-01"));
  CHECK_THROWS(parse_day("garbage"));
}
