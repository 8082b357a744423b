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

#include <sstream>

#include <doctest.h>

#include <json.hpp>

#include "hires/config.hpp"
#include "hires/geojson.hpp"

using namespace hires;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return RunConfig::parse(in);
}

}  // namespace

TEST_CASE("RunConfig parses key = value with comments and blanks") {
  auto cfg = parse(
      "# comment\n"
      "\n"
      "seed = 99\n"
      "decay.incubation_days = 7\n"
      "score.reducer = mean\n"
      "cleaning.speed_cut_kmh = 42.5\n");
  CHECK(cfg.seed() == 99);
  CHECK(cfg.decay().incubation_days == 7);
  CHECK(cfg.score().reducer == WindowReducer::kMean);
  CHECK(cfg.cleaning().speed_cut_kmh == doctest::Approx(42.5));
  CHECK(cfg.warnings().empty());
}

TEST_CASE("RunConfig defaults match the documented values") {
  auto cfg = parse("");
  CHECK(cfg.seed() == 20200101);
  CHECK(cfg.utc_offset_s() == 8 * 3600);
  CHECK(cfg.terminal_dwell_s() == 3600);
  CHECK(cfg.detect_q() == doctest::Approx(0.95));
  auto d = cfg.decay();
  CHECK(d.incubation_days == 14);
  CHECK(d.recovery_days == 10);
  CHECK(d.outdoor_weights == std::vector<double>{200.0, 100.0, 50.0});
  CHECK(d.viral_weights == std::vector<double>{1.0, 0.1, 0.01});
  auto c = cfg.cleaning();
  CHECK(c.speed_cut_kmh == doctest::Approx(38.0));
  CHECK(c.min_dwell_s == doctest::Approx(300.0));
  CHECK(c.aba_window_s == doctest::Approx(120.0));
  auto s = cfg.score();
  CHECK(s.window_days == 14);
  CHECK(s.reducer == WindowReducer::kMax);
  auto w = cfg.world();
  CHECK(w.n_agents == 20000);
  CHECK(w.n_days == 28);
  CHECK(w.infection_rate == doctest::Approx(0.03));
  auto f = cfg.forest();
  CHECK(f.n_trees == 100);
  CHECK(f.tree.max_depth == 8);
  CHECK(f.tree.min_leaf == 5);
}

TEST_CASE("RunConfig collects unknown keys as warnings") {
  auto cfg = parse("seed = 1\nsuch.unknown.key = 3\n");
  REQUIRE(cfg.warnings().size() == 1);
  CHECK(cfg.warnings()[0].find("such.unknown.key") != std::string::npos);
}

TEST_CASE("RunConfig rejects malformed lines and bad values") {
  std::istringstream bad("seed 99\n");
  CHECK_THROWS(RunConfig::parse(bad));
  auto cfg = parse("decay.incubation_days = banana\n");
  CHECK_THROWS(cfg.decay());
  auto cfg2 = parse("detect.q = 1.5\n");
  CHECK_THROWS(cfg2.detect_q());
  auto cfg3 = parse("score.reducer = median\n");
  CHECK_THROWS(cfg3.score());
}

TEST_CASE("RunConfig typed getters") {
  auto cfg = parse(
      "a.str = hello\n"
      "a.num = 2.5\n"
      "a.int = -4\n"
      "a.flag = true\n"
      "a.list = 3, 2, 1\n");
  CHECK(cfg.get_string("a.str", "x") == "hello");
  CHECK(cfg.get_double("a.num", 0) == doctest::Approx(2.5));
  CHECK(cfg.get_int("a.int", 0) == -4);
  CHECK(cfg.get_bool("a.flag", false));
  CHECK(cfg.get_doubles("a.list", {}) == std::vector<double>{3, 2, 1});
  CHECK(cfg.get_string("missing", "fallback") == "fallback");
  CHECK(cfg.get_int("missing", 42) == 42);
  CHECK(cfg.warnings().size() == 5);  // a.* are not known keys
}

TEST_CASE("write_geojson emits a valid FeatureCollection") {
  RiskMap map;
  map.day = parse_day("2020-01-20");
  map.cells["d|l|c1"] = {30.25, 114.5, 0.123456789012345};
  map.cells["d|l|c2"] = {30.26, 114.51, 350.0};
  std::ostringstream out;
  write_geojson(out, map);
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["type"] == "FeatureCollection");
  REQUIRE(j["features"].size() == 2);
  const auto& f = j["features"][0];
  CHECK(f["type"] == "Feature");
  CHECK(f["geometry"]["type"] == "Point");
  // GeoJSON positions are [lng, lat]
  CHECK(f["geometry"]["coordinates"][0].get<double>() ==
        doctest::Approx(114.5).epsilon(1e-12));
  CHECK(f["geometry"]["coordinates"][1].get<double>() ==
        doctest::Approx(30.25).epsilon(1e-12));
  CHECK(f["properties"]["cell_key"] == "d|l|c1");
  CHECK(f["properties"]["day"] == "2020-01-20");
  CHECK(f["properties"]["risk"].get<double>() ==
        doctest::Approx(0.123456789012345).epsilon(1e-9));
}

TEST_CASE("write_geojson on an empty map") {
  RiskMap map;
  map.day = 0;
  std::ostringstream out;
  write_geojson(out, map);
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["type"] == "FeatureCollection");
  CHECK(j["features"].empty());
}
