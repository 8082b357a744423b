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
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hires/cleaning.hpp"
#include "hires/detect.hpp"
#include "hires/riskfield.hpp"
#include "hires/score.hpp"
#include "hires/simgen.hpp"

namespace hires {

/// Flat "key = value" configuration with '#' comments. Unknown keys are
/// collected as warnings, not errors.
class RunConfig {
 public:
  RunConfig() = default;
  static RunConfig parse(std::istream& in);

  const std::vector<std::string>& warnings() const { return warnings_; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, std::string def) const;
  double get_double(const std::string& key, double def) const;
  std::int64_t get_int(const std::string& key, std::int64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<double> get_doubles(const std::string& key,
                                  std::vector<double> def) const;

  CleaningConfig cleaning() const;
  DecayParams decay() const;
  ScoreParams score() const;
  WorldConfig world() const;
  std::int64_t utc_offset_s() const;
  std::int64_t terminal_dwell_s() const;
  std::uint64_t seed() const;
  double detect_q() const;
  ForestParams forest() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> warnings_;
};

}  // namespace hires
