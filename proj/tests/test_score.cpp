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

#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "hires/score.hpp"
#include "oracle.hpp"

using namespace hires;

namespace {

const std::int64_t kDay = parse_day("2020-01-20");
const std::vector<double> kViral = {1.0, 0.1, 0.01};

DwellSegment stay(const std::string& user, const std::string& cell,
                  std::int64_t day, std::int64_t offset_s,
                  std::int64_t seconds) {
  const std::int64_t t0 = day_start(day, kDefaultUtcOffsetS) + offset_s;
  return {user, cell, 30.0, 114.0, t0, t0 + seconds};
}

// Fraction table with `user` in `cell` all day for days [kDay-3, kDay].
StayFractionTable all_day_table(const std::string& user,
                                const std::string& cell) {
  std::vector<DwellSegment> segs;
  for (std::int64_t d = kDay - 3; d <= kDay; ++d)
    segs.push_back(stay(user, cell, d, 0, 86400));
  return StayFractionTable::build(segs);
}

std::map<std::int64_t, RiskMap> constant_maps(const std::string& cell,
                                              double risk) {
  std::map<std::int64_t, RiskMap> maps;
  for (std::int64_t d = kDay - 3; d <= kDay; ++d) {
    RiskMap m;
    m.day = d;
    m.cells[cell] = {30.0, 114.0, risk};
    maps[d] = m;
  }
  return maps;
}

}  // namespace

TEST_CASE("daily_score: full day in a cell with risk 350 on all days -> 388.5") {
  auto table = all_day_table("u", "A");
  auto maps = constant_maps("A", 350.0);
  CHECK(daily_score(table, "u", maps, kViral, kDay) ==
        doctest::Approx(388.5).epsilon(1e-12));
}

TEST_CASE("daily_score: no overlap with risky cells -> 0") {
  auto table = all_day_table("u", "B");
  auto maps = constant_maps("A", 350.0);
  CHECK(daily_score(table, "u", maps, kViral, kDay) == 0.0);
}

TEST_CASE("daily_score: missing maps in the lookback count as zero") {
  auto table = all_day_table("u", "A");
  std::map<std::int64_t, RiskMap> maps;
  RiskMap m;
  m.day = kDay;
  m.cells["A"] = {30.0, 114.0, 100.0};
  maps[kDay] = m;
  CHECK(daily_score(table, "u", maps, kViral, kDay) ==
        doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("daily_score: fractional overlap weights the map value") {
  std::vector<DwellSegment> segs = {stay("u", "A", kDay, 0, 21600),
                                    stay("u", "B", kDay, 21600, 64800)};
  auto table = StayFractionTable::build(segs);
  std::map<std::int64_t, RiskMap> maps;
  RiskMap m;
  m.day = kDay;
  m.cells["A"] = {30.0, 114.0, 200.0};
  m.cells["B"] = {30.0, 114.0, 40.0};
  maps[kDay] = m;
  // 0.25 * 200 + 0.75 * 40 = 80
  CHECK(daily_score(table, "u", maps, kViral, kDay) ==
        doctest::Approx(80.0).epsilon(1e-12));
}

TEST_CASE("windowed_score examples") {
  std::vector<double> daily = {0.1, 0.5, 0.3};
  auto w = windowed_score(daily, 2);
  REQUIRE(w.size() == 3);
  CHECK(w[2] == doctest::Approx(0.5));
  CHECK(w[0] == doctest::Approx(0.1));
  CHECK(w[1] == doctest::Approx(0.5));

  std::vector<double> constant = {2.5, 2.5, 2.5, 2.5};
  auto wc = windowed_score(constant, 14);
  for (double v : wc) CHECK(v == doctest::Approx(2.5));

  auto w0 = windowed_score(daily, 0);
  CHECK(w0 == daily);
}

TEST_CASE("windowed_score reducers") {
  std::vector<double> daily = {1.0, 2.0, 3.0};
  auto wmax = windowed_score(daily, 2, WindowReducer::kMax);
  auto wsum = windowed_score(daily, 2, WindowReducer::kSum);
  auto wmean = windowed_score(daily, 2, WindowReducer::kMean);
  CHECK(wmax[2] == doctest::Approx(3.0));
  CHECK(wsum[2] == doctest::Approx(6.0));
  CHECK(wmean[2] == doctest::Approx(2.0));
  // truncated window at the series start
  CHECK(wsum[0] == doctest::Approx(1.0));
  CHECK(wmean[1] == doctest::Approx(1.5));
}

TEST_CASE("windowed max is monotone in the window length") {
  std::mt19937 rng(17);
  std::vector<double> daily;
  for (int i = 0; i < 40; ++i)
    daily.push_back(std::uniform_real_distribution<double>(0, 10)(rng));
  auto w3 = windowed_score(daily, 3);
  auto w7 = windowed_score(daily, 7);
  for (std::size_t i = 0; i < daily.size(); ++i) {
    CHECK(w7[i] >= w3[i]);
    CHECK(w3[i] >= daily[i]);
  }
}

namespace {

struct Cohort {
  std::vector<DwellSegment> segs;
  CaseRegistry registry;
  std::vector<std::string> users;
  CellTable cells;
};

Cohort make_cohort(std::mt19937& rng, int n_users, int n_cells, int n_days) {
  Cohort c;
  std::vector<CaseEntry> entries;
  for (int u = 0; u < n_users; ++u) {
    const std::string user = "u" + std::to_string(u);
    c.users.push_back(user);
    if (std::bernoulli_distribution(0.5)(rng)) {
      entries.push_back({user, CaseLabel::kConfirmed,
                         kDay + std::uniform_int_distribution<int>(
                                    2, n_days + 2)(rng),
                         10});
    } else {
      entries.push_back({user, CaseLabel::kNormal, std::nullopt, 10});
    }
    for (std::int64_t d = kDay; d < kDay + n_days; ++d) {
      std::int64_t off = 0;
      const int n = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int i = 0; i < n; ++i) {
        const std::int64_t len = std::uniform_int_distribution<std::int64_t>(
            600, (86400 - off) / (n - i))(rng);
        c.segs.push_back(stay(user, "c" + std::to_string(int(rng() % unsigned(n_cells))),
                              d, off, len));
        off += len;
      }
    }
  }
  c.registry = CaseRegistry(std::move(entries));
  for (const auto& s : c.segs) c.cells[s.cell_key] = {s.lat, s.lng};
  return c;
}

}  // namespace

TEST_CASE("score_cohort matches the nested-loop oracle") {
  std::mt19937 rng(909);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = make_cohort(rng, 4, 6, 10);
    auto table = StayFractionTable::build(c.segs);
    DecayParams dp;
    auto series = compute_risk_series(table, c.registry, dp, kDay, kDay + 9,
                                      c.cells);
    ScoreParams sp;
    auto scores = score_cohort(c.users, table, c.registry, series, sp, kDay,
                               kDay + 9);
    // oracle inputs
    std::vector<oracle::Stay> stays;
    for (const auto& [day, users] : table.days())
      for (const auto& [user, cells] : users)
        for (const auto& [cell, frac] : cells)
          stays.push_back({user, cell, day, frac});
    std::vector<oracle::Case> cases;
    for (const auto* e : c.registry.confirmed())
      cases.push_back({e->user_id, *e->confirmed_day, e->recovery_days});
    oracle::Params op;
    for (const auto& s : scores) {
      for (std::int64_t d = kDay; d <= kDay + 9; ++d) {
        const double expect =
            oracle::personal_score(stays, cases, op, s.user_id, d);
        CHECK(s.base_on(d) == doctest::Approx(expect).epsilon(1e-9));
      }
      // windowed max invariant
      for (std::size_t i = 0; i < s.base.size(); ++i) {
        double m = 0.0;
        for (std::size_t j = i >= 14 ? i - 14 : 0; j <= i; ++j)
          m = std::max(m, s.base[j]);
        CHECK(s.window[i] == doctest::Approx(m).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("scores scale linearly with the field and preserve ranking") {
  std::mt19937 rng(4242);
  auto c = make_cohort(rng, 5, 5, 8);
  auto table = StayFractionTable::build(c.segs);
  DecayParams dp;
  auto series = compute_risk_series(table, c.registry, dp, kDay, kDay + 7,
                                    c.cells);
  RiskSeries scaled = series;
  for (auto& [d, m] : scaled.maps)
    for (auto& [k, cell] : m.cells) cell.risk *= 3.0;
  for (auto& [d, f] : scaled.base)
    for (auto& [k, v] : f) v *= 3.0;
  ScoreParams sp;
  auto s1 = score_cohort(c.users, table, c.registry, series, sp, kDay, kDay + 7);
  auto s2 = score_cohort(c.users, table, c.registry, scaled, sp, kDay, kDay + 7);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t u = 0; u < s1.size(); ++u) {
    for (std::size_t i = 0; i < s1[u].base.size(); ++i) {
      CHECK(s2[u].base[i] == doctest::Approx(3.0 * s1[u].base[i]).epsilon(1e-9));
      CHECK(s2[u].window[i] ==
            doctest::Approx(3.0 * s1[u].window[i]).epsilon(1e-9));
    }
  }
  // ranking by final windowed score is unchanged
  auto rank = [](const std::vector<PersonScoreSeries>& ss) {
    std::vector<std::size_t> idx(ss.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return ss[a].window.back() < ss[b].window.back();
    });
    return idx;
  };
  CHECK(rank(s1) == rank(s2));
}

TEST_CASE("leave-one-out zeroes the single case's own score") {
  std::vector<DwellSegment> segs;
  for (std::int64_t d = kDay; d <= kDay + 5; ++d)
    segs.push_back(stay("u", "A", d, 0, 86400));
  auto table = StayFractionTable::build(segs);
  CaseRegistry reg({{"u", CaseLabel::kConfirmed, kDay + 6, 10}});
  CellTable cells{{"A", {30.0, 114.0}}};
  DecayParams dp;
  auto series = compute_risk_series(table, reg, dp, kDay, kDay + 5, cells);
  std::vector<std::string> users = {"u"};
  ScoreParams sp;
  auto with_self = score_cohort(users, table, reg, series, sp, kDay, kDay + 5);
  REQUIRE(with_self.size() == 1);
  CHECK(with_self[0].window.back() > 0.0);
  sp.leave_one_out = true;
  auto without = score_cohort(users, table, reg, series, sp, kDay, kDay + 5);
  for (double v : without[0].base) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("identical trajectories give identical scores") {
  std::vector<DwellSegment> segs;
  for (std::int64_t d = kDay; d <= kDay + 4; ++d) {
    segs.push_back(stay("a", "A", d, 0, 43200));
    segs.push_back(stay("a", "B", d, 43200, 43200));
    segs.push_back(stay("b", "A", d, 0, 43200));
    segs.push_back(stay("b", "B", d, 43200, 43200));
    segs.push_back(stay("sick", "A", d, 0, 86400));
  }
  auto table = StayFractionTable::build(segs);
  CaseRegistry reg({{"sick", CaseLabel::kConfirmed, kDay + 5, 10},
                    {"a", CaseLabel::kNormal, std::nullopt, 10},
                    {"b", CaseLabel::kNormal, std::nullopt, 10}});
  CellTable cells{{"A", {30.0, 114.0}}, {"B", {30.01, 114.0}}};
  DecayParams dp;
  auto series = compute_risk_series(table, reg, dp, kDay, kDay + 4, cells);
  std::vector<std::string> users = {"a", "b"};
  ScoreParams sp;
  auto scores = score_cohort(users, table, reg, series, sp, kDay, kDay + 4);
  REQUIRE(scores.size() == 2);
  CHECK(scores[0].base == scores[1].base);
  CHECK(scores[0].window == scores[1].window);
  CHECK(scores[0].window.back() > 0.0);
}

TEST_CASE("absent user gets a flagged zero series") {
  auto table = all_day_table("u", "A");
  CaseRegistry reg({{"u", CaseLabel::kNormal, std::nullopt, 10},
                    {"ghost", CaseLabel::kNormal, std::nullopt, 10}});
  RiskSeries series;
  std::vector<std::string> users = {"ghost"};
  ScoreParams sp;
  auto scores = score_cohort(users, table, reg, series, sp, kDay, kDay + 2);
  REQUIRE(scores.size() == 1);
  CHECK(scores[0].missing_trajectory);
  for (double v : scores[0].base) CHECK(v == 0.0);
}

TEST_CASE("score persistence round-trip") {
  PersonScoreSeries a{"alice", kDay, {1.0, 2.5, 0.125}, {1.0, 2.5, 2.5}, false};
  PersonScoreSeries b{"bob", kDay, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, true};
  std::vector<PersonScoreSeries> scores = {a, b};
  std::ostringstream out;
  write_scores(out, scores);
  std::istringstream in(out.str());
  auto again = read_scores(in);
  REQUIRE(again.size() == 2);
  CHECK(again[0].user_id == "alice");
  CHECK(again[0].first_day == kDay);
  CHECK(again[0].base == a.base);
  CHECK(again[0].window == a.window);
  CHECK(again[1].base == b.base);
  // out-of-range lookups are zero
  CHECK(again[0].base_on(kDay - 1) == 0.0);
  CHECK(again[0].window_on(kDay + 99) == 0.0);
  CHECK(again[0].base_on(kDay + 1) == doctest::Approx(2.5));
}
