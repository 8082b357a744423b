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

#include "hires/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "hires/ingest.hpp"

namespace hires {

std::vector<DwellSegment> remove_aba_switches(std::vector<DwellSegment> segs,
                                              double aba_window_s) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<DwellSegment> out;
    out.reserve(segs.size());
    for (DwellSegment& s : segs) {
      if (out.size() >= 2 && out[out.size() - 2].cell_key == s.cell_key &&
          double(out.back().dwell_s()) <= aba_window_s) {
        out.pop_back();  // drop B
        out.back().end = s.end;
        changed = true;
        continue;
      }
      out.push_back(std::move(s));
    }
    segs = std::move(out);
  }
  return segs;
}

std::vector<SwitchSpeed> switch_speeds(std::span<const DwellSegment> segs) {
  std::vector<SwitchSpeed> out;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const std::int64_t dt = segs[i + 1].start - segs[i].start;
    if (dt <= 0) continue;
    const double meters = haversine_m(segs[i].lat, segs[i].lng,
                                      segs[i + 1].lat, segs[i + 1].lng);
    out.push_back(SwitchSpeed{i + 1, meters / double(dt) * 3.6});
  }
  return out;
}

KMeansResult kmeans_1d(const std::vector<double>& values, int k,
                       int max_iter) {
  if (values.empty()) throw std::invalid_argument("kmeans_1d: empty input");
  if (k <= 0) throw std::invalid_argument("kmeans_1d: k must be positive");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t distinct =
      std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  if (std::size_t(k) > distinct) {
    throw std::invalid_argument("kmeans_1d: k exceeds distinct value count");
  }
  sorted = values;
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  std::vector<double> centroids(k);
  for (int j = 0; j < k; ++j) {
    const double q = double(2 * j + 1) / double(2 * k);
    centroids[j] = sorted[std::min(n - 1, std::size_t(q * double(n)))];
  }

  std::vector<int> assignment(values.size(), 0);
  auto nearest = [&](double v) {
    int best = 0;
    double best_d = std::abs(v - centroids[0]);
    for (int j = 1; j < k; ++j) {
      const double d = std::abs(v - centroids[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return best;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = (iter == 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const int a = nearest(values[i]);
      if (a != assignment[i]) changed = true;
      assignment[i] = a;
    }
    if (!changed) break;
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[assignment[i]] += values[i];
      ++count[assignment[i]];
    }
    for (int j = 0; j < k; ++j) {
      if (count[j] > 0) centroids[j] = sum[j] / double(count[j]);
    }
  }
  // quantile init keeps centroids ordered through Lloyd updates in 1-D
  return KMeansResult{std::move(centroids), std::move(assignment)};
}

double suggest_speed_cut(const std::vector<double>& speeds_kmh, int k,
                         int max_iter) {
  KMeansResult r = kmeans_1d(speeds_kmh, k, max_iter);
  double cut = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < speeds_kmh.size(); ++i) {
    if (r.assignment[i] == 0) cut = std::max(cut, speeds_kmh[i]);
  }
  return cut;
}

std::vector<DwellSegment> speed_filter(std::vector<DwellSegment> segs,
                                       std::span<const SwitchSpeed> speeds,
                                       double speed_cut_kmh) {
  std::set<std::size_t> drop;
  for (const SwitchSpeed& s : speeds) {
    if (s.kmh > speed_cut_kmh) drop.insert(s.segment);
  }
  if (drop.empty()) return segs;
  std::vector<DwellSegment> out;
  out.reserve(segs.size() - drop.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!drop.count(i)) out.push_back(std::move(segs[i]));
  }
  return out;
}

std::vector<DwellSegment> dwell_filter(std::vector<DwellSegment> segs,
                                       double min_dwell_s) {
  std::erase_if(segs, [min_dwell_s](const DwellSegment& s) {
    return double(s.dwell_s()) < min_dwell_s;
  });
  return segs;
}

std::vector<DwellSegment> clean_user(std::vector<DwellSegment> segs,
                                     const CleaningConfig& config) {
  // Removals change adjacency, which can expose new A-B-A patterns or
  // over-speed pairs; iterate the whole pass until stable so the
  // pipeline is idempotent. Each pass shrinks the segment count.
  while (true) {
    const std::size_t before = segs.size();
    segs = remove_aba_switches(std::move(segs), config.aba_window_s);
    auto speeds = switch_speeds(segs);
    segs = speed_filter(std::move(segs), speeds, config.speed_cut_kmh);
    segs = dwell_filter(std::move(segs), config.min_dwell_s);
    if (segs.size() == before) break;
  }
  return segs;
}

}  // namespace hires
