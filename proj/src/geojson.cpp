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

#include "hires/geojson.hpp"

#include <ostream>

#include <json.hpp>

namespace hires {

void write_geojson(std::ostream& out, const RiskMap& map) {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const auto& [key, cell] : map.cells) {
    nlohmann::ordered_json feature = {
        {"type", "Feature"},
        {"geometry",
         {{"type", "Point"},
          // GeoJSON positions are [longitude, latitude]
          {"coordinates", {cell.lng, cell.lat}}}},
        {"properties",
         {{"cell_key", key},
          {"risk", cell.risk},
          {"day", format_day(map.day)}}},
    };
    features.push_back(std::move(feature));
  }
  nlohmann::ordered_json collection = {{"type", "FeatureCollection"},
                                       {"features", std::move(features)}};
  out << collection.dump(2) << "\n";
}

}  // namespace hires
