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

#include "hires/pipeline.hpp"

namespace hires {

StayFractionTable stay_fractions_from(const TrajectoryData& data,
                                      const PipelineConfig& config) {
  std::vector<DwellSegment> all;
  const ObservationWindow window{
      data.min_timestamp, data.max_timestamp + config.terminal_dwell_s};
  for (const auto& records : data.users) {
    auto segs =
        build_dwell_segments(records, window, config.terminal_dwell_s);
    segs = clean_user(std::move(segs), config.cleaning);
    segs = split_at_day_boundaries(std::move(segs), config.utc_offset_s);
    all.insert(all.end(), std::make_move_iterator(segs.begin()),
               std::make_move_iterator(segs.end()));
  }
  return StayFractionTable::build(all, config.utc_offset_s);
}

std::vector<std::string> user_ids(const TrajectoryData& data) {
  std::vector<std::string> ids;
  ids.reserve(data.users.size());
  for (const auto& records : data.users) {
    ids.push_back(records.front().user_id);
  }
  return ids;
}

}  // namespace hires
