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

#include <string>
#include <vector>

#include "hires/cleaning.hpp"
#include "hires/ingest.hpp"
#include "hires/riskfield.hpp"

namespace hires {

struct PipelineConfig {
  CleaningConfig cleaning;
  std::int64_t utc_offset_s = kDefaultUtcOffsetS;
  std::int64_t terminal_dwell_s = 3600;
};

/// Ingest-to-fractions front half of the pipeline: dwell segments per
/// user, cleaning, midnight splitting, per-day stay fractions. The
/// observation window is [min_ts, max_ts + terminal_dwell].
StayFractionTable stay_fractions_from(const TrajectoryData& data,
                                      const PipelineConfig& config);

/// All user ids present in a parsed corpus, sorted.
std::vector<std::string> user_ids(const TrajectoryData& data);

}  // namespace hires
