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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hires/score.hpp"
#include "hires/types.hpp"

namespace hires {

/// Null distribution of normal-group scores, kept as the sorted sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> sample);

  // Fraction of samples <= x.
  double operator()(double x) const;

  // ceil(q*n)-th order statistic, no interpolation.
  double critical_value(double q) const;

  std::size_t size() const { return sample_.size(); }

 private:
  std::vector<double> sample_;  // ascending
};

struct DetectionOutcome {
  std::string user_id;
  bool suspected = false;
  double p_value = 1.0;  // 1 - F0(score)
};

/// Flags every score strictly above the threshold.
std::vector<DetectionOutcome> detect_stat(
    std::span<const std::pair<std::string, double>> scores, double threshold,
    const EmpiricalCdf& null_cdf);

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::int64_t total() const { return tp + fp + tn + fn; }
};

struct DetectionMetrics {
  std::optional<double> dr;   // tp / (tp + fn)
  std::optional<double> far;  // fp / (fp + tn)
  std::optional<double> acc;  // (tp + tn) / total
};

ConfusionCounts confusion(std::span<const DetectionOutcome> outcomes,
                          const CaseRegistry& registry);
DetectionMetrics compute_metrics(const ConfusionCounts& counts);

/// One row per user: daily base scores over [window_first, window_last],
/// label +1 confirmed / -1 normal.
struct FeatureMatrix {
  std::vector<std::string> users;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  std::size_t n_features() const {
    return rows.empty() ? 0 : rows.front().size();
  }
};

FeatureMatrix build_features(std::span<const PersonScoreSeries> scores,
                             const CaseRegistry& registry,
                             std::int64_t window_first,
                             std::int64_t window_last);

struct TreeParams {
  int max_depth = 8;
  int min_leaf = 5;
};

/// Axis-aligned binary classification tree trained with Gini impurity;
/// best threshold per feature by exhaustive midpoint scan. Leaf ties
/// predict -1 (normal).
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int leaf_class = -1;
  };

  static DecisionTree train(const FeatureMatrix& data, const TreeParams& p);
  // Restricted variant used by forests: only `feature_subset` may be
  // split on at each node; the rng draws the subset.
  static DecisionTree train_subset(const std::vector<std::vector<double>>& x,
                                   const std::vector<int>& y,
                                   std::span<const std::size_t> indices,
                                   const TreeParams& p, int features_per_split,
                                   std::uint64_t seed);

  int predict(std::span<const double> row) const;
  const std::vector<Node>& nodes() const { return nodes_; }

  void save(std::ostream& out) const;
  static DecisionTree load(std::istream& in);

 private:
  std::vector<Node> nodes_;
};

struct ForestParams {
  TreeParams tree;
  int n_trees = 100;
  int features_per_split = 0;  // 0: ceil(sqrt(d))
  bool bootstrap = true;       // off: every tree sees the full sample
  std::uint64_t seed = 1;
  int n_threads = 1;
};

/// Bagged trees with feature subsampling per split; per-tree seed is
/// params.seed + tree index, so training is reproducible and parallel
/// by tree. Vote ties predict -1 (normal).
class RandomForest {
 public:
  static RandomForest train(const FeatureMatrix& data, const ForestParams& p);
  int predict(std::span<const double> row) const;
  const std::vector<DecisionTree>& trees() const { return trees_; }

  void save(std::ostream& out) const;
  static RandomForest load(std::istream& in);

 private:
  std::vector<DecisionTree> trees_;
};

/// Deterministic stratified train/test split by label.
struct SplitIndices {
  std::vector<std::size_t> train, test;
};
SplitIndices stratified_split(std::span<const int> labels, double train_frac,
                              std::uint64_t seed);

struct SweepRow {
  double rate = 0.0;
  std::size_t n_confirmed = 0, n_normal = 0;
  DetectionMetrics stat, tree, forest;
  double tree_train_s = 0.0, forest_train_s = 0.0;
};

struct SweepParams {
  double train_frac = 0.8;
  double q = 0.95;
  ForestParams forest;
  std::uint64_t seed = 1;
};

/// For each infection rate, subsamples the cohort to that rate,
/// trains/evaluates both classifiers and the threshold test on the
/// held-out split. The normal group is subsampled to hit the rate; if
/// too small, the confirmed group is subsampled instead.
std::vector<SweepRow> evaluate_sweep(const FeatureMatrix& full,
                                     std::span<const double> rates,
                                     const SweepParams& params);

}  // namespace hires
