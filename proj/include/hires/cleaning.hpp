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

#include <cstddef>
#include <span>
#include <vector>

#include "hires/types.hpp"

namespace hires {

struct CleaningConfig {
  double aba_window_s = 120.0;   // max dwell of the spurious middle cell
  double speed_cut_kmh = 38.0;   // entry-speed cut
  double min_dwell_s = 300.0;    // segments shorter than this are dropped
  int kmeans_k = 2;
  int kmeans_max_iter = 100;
};

/// Deletes ping-pong handovers: in any A,B,A pattern with B's dwell at
/// most `aba_window_s`, B is removed and the A segments merge. Applied
/// until fixpoint.
std::vector<DwellSegment> remove_aba_switches(std::vector<DwellSegment> segs,
                                              double aba_window_s);

struct SwitchSpeed {
  std::size_t segment;  // index of the segment being entered
  double kmh;
};

/// Entry speed of each segment after the first, from cell displacement
/// over start-time difference. Equal start times are skipped.
std::vector<SwitchSpeed> switch_speeds(std::span<const DwellSegment> segs);

struct KMeansResult {
  std::vector<double> centroids;  // ascending
  std::vector<int> assignment;    // cluster index per input value
};

/// 1-D Lloyd k-means with quantile initialization (centroid j starts at
/// the (2j+1)/(2k) quantile), so results are deterministic.
KMeansResult kmeans_1d(const std::vector<double>& values, int k,
                       int max_iter = 100);

/// Upper edge of the slowest speed cluster, as a data-driven suggestion
/// for the speed cut.
double suggest_speed_cut(const std::vector<double>& speeds_kmh, int k = 2,
                         int max_iter = 100);

std::vector<DwellSegment> speed_filter(std::vector<DwellSegment> segs,
                                       std::span<const SwitchSpeed> speeds,
                                       double speed_cut_kmh);

std::vector<DwellSegment> dwell_filter(std::vector<DwellSegment> segs,
                                       double min_dwell_s);

/// Full per-user pipeline: A-B-A removal, speed filter, dwell filter.
std::vector<DwellSegment> clean_user(std::vector<DwellSegment> segs,
                                     const CleaningConfig& config);

}  // namespace hires
