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

#include "hires/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hires {

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample)
    : sample_(std::move(sample)) {
  if (sample_.empty()) {
    throw std::invalid_argument("empirical CDF needs at least one sample");
  }
  std::sort(sample_.begin(), sample_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sample_.begin(), sample_.end(), x);
  return double(it - sample_.begin()) / double(sample_.size());
}

double EmpiricalCdf::critical_value(double q) const {
  if (q <= 0.0 || q >= 1.0) {
    throw std::invalid_argument("quantile level must be in (0, 1)");
  }
  const std::size_t rank = std::size_t(std::ceil(q * double(sample_.size())));
  return sample_[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<DetectionOutcome> detect_stat(
    std::span<const std::pair<std::string, double>> scores, double threshold,
    const EmpiricalCdf& null_cdf) {
  if (!std::isfinite(threshold)) {
    throw std::invalid_argument("threshold must be finite");
  }
  std::vector<DetectionOutcome> out;
  out.reserve(scores.size());
  for (const auto& [user, score] : scores) {
    out.push_back(
        DetectionOutcome{user, score > threshold, 1.0 - null_cdf(score)});
  }
  return out;
}

ConfusionCounts confusion(std::span<const DetectionOutcome> outcomes,
                          const CaseRegistry& registry) {
  ConfusionCounts c;
  for (const DetectionOutcome& o : outcomes) {
    const CaseEntry* e = registry.find(o.user_id);
    if (e == nullptr) {
      throw std::invalid_argument("user missing from registry: " + o.user_id);
    }
    const bool positive = e->label == CaseLabel::kConfirmed;
    if (positive) {
      o.suspected ? ++c.tp : ++c.fn;
    } else {
      o.suspected ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

DetectionMetrics compute_metrics(const ConfusionCounts& c) {
  DetectionMetrics m;
  if (c.tp + c.fn > 0) m.dr = double(c.tp) / double(c.tp + c.fn);
  if (c.fp + c.tn > 0) m.far = double(c.fp) / double(c.fp + c.tn);
  if (c.total() > 0) m.acc = double(c.tp + c.tn) / double(c.total());
  return m;
}

FeatureMatrix build_features(std::span<const PersonScoreSeries> scores,
                             const CaseRegistry& registry,
                             std::int64_t window_first,
                             std::int64_t window_last) {
  if (window_last < window_first) {
    throw std::invalid_argument("empty feature window");
  }
  FeatureMatrix m;
  for (const PersonScoreSeries& s : scores) {
    const std::int64_t cover_last =
        s.first_day + std::int64_t(s.base.size()) - 1;
    if (window_first < s.first_day || window_last > cover_last) {
      throw std::invalid_argument("feature window outside score coverage for "
                                  "user " + s.user_id);
    }
    const CaseEntry* e = registry.find(s.user_id);
    if (e == nullptr) {
      throw std::invalid_argument("user missing from registry: " + s.user_id);
    }
    std::vector<double> row;
    row.reserve(std::size_t(window_last - window_first + 1));
    for (std::int64_t d = window_first; d <= window_last; ++d) {
      row.push_back(s.base_on(d));
    }
    m.users.push_back(s.user_id);
    m.rows.push_back(std::move(row));
    m.labels.push_back(e->label == CaseLabel::kConfirmed ? 1 : -1);
  }
  return m;
}

namespace {

int majority_class(std::span<const std::size_t> idx,
                   const std::vector<int>& y) {
  std::int64_t pos = 0;
  for (std::size_t i : idx) pos += (y[i] == 1);
  const std::int64_t neg = std::int64_t(idx.size()) - pos;
  return pos > neg ? 1 : -1;  // tie -> normal
}

double gini(std::int64_t pos, std::int64_t n) {
  if (n == 0) return 0.0;
  const double p = double(pos) / double(n);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& x,
              const std::vector<int>& y, const TreeParams& p,
              int features_per_split, std::uint64_t seed)
      : x_(x), y_(y), params_(p), mtry_(features_per_split), rng_(seed) {}

  std::vector<DecisionTree::Node> build(std::vector<std::size_t> indices) {
    if (indices.empty()) {
      throw std::invalid_argument("cannot train a tree on zero samples");
    }
    grow(std::move(indices), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t> idx, int depth) {
    const int node_id = int(nodes_.size());
    nodes_.emplace_back();
    const std::int64_t pos =
        std::count_if(idx.begin(), idx.end(),
                      [&](std::size_t i) { return y_[i] == 1; });
    const bool pure = pos == 0 || pos == std::int64_t(idx.size());
    BestSplit best;
    if (!pure && depth < params_.max_depth &&
        std::int64_t(idx.size()) >= 2 * params_.min_leaf) {
      best = find_split(idx);
    }
    if (!best.found) {
      nodes_[node_id].leaf_class = majority_class(idx, y_);
      return node_id;
    }
    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (x_[i][best.feature] <= best.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    nodes_[node_id].feature = best.feature;
    nodes_[node_id].threshold = best.threshold;
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    nodes_[node_id].left = l;
    nodes_[node_id].right = r;
    return node_id;
  }

  BestSplit find_split(const std::vector<std::size_t>& idx) {
    const int d = int(x_[idx.front()].size());
    std::vector<int> features(d);
    std::iota(features.begin(), features.end(), 0);
    if (mtry_ > 0 && mtry_ < d) {
      // partial Fisher-Yates; the drawn prefix stays sorted for a
      // deterministic scan order
      for (int i = 0; i < mtry_; ++i) {
        std::uniform_int_distribution<int> pick(i, d - 1);
        std::swap(features[i], features[pick(rng_)]);
      }
      features.resize(mtry_);
      std::sort(features.begin(), features.end());
    }

    BestSplit best;
    std::vector<std::pair<double, int>> vals(idx.size());
    for (int f : features) {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        vals[i] = {x_[idx[i]][f], y_[idx[i]]};
      }
      std::sort(vals.begin(), vals.end());
      std::int64_t pos_left = 0;
      std::int64_t total_pos = 0;
      for (const auto& [v, label] : vals) total_pos += (label == 1);
      const std::int64_t n = std::int64_t(vals.size());
      for (std::int64_t i = 0; i + 1 < n; ++i) {
        pos_left += (vals[i].second == 1);
        if (vals[i].first == vals[i + 1].first) continue;
        const std::int64_t nl = i + 1, nr = n - nl;
        if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
        const double imp = (double(nl) * gini(pos_left, nl) +
                            double(nr) * gini(total_pos - pos_left, nr)) /
                           double(n);
        const double thr = vals[i].first +
                           (vals[i + 1].first - vals[i].first) / 2.0;
        if (!best.found || imp < best.impurity) {
          best = BestSplit{true, f, thr, imp};
        }
      }
    }
    // reject splits that do not reduce impurity at all
    if (best.found) {
      std::int64_t total_pos = 0;
      for (std::size_t i : idx) total_pos += (y_[i] == 1);
      if (best.impurity >=
          gini(total_pos, std::int64_t(idx.size())) - 1e-15) {
        best.found = false;
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<int>& y_;
  TreeParams params_;
  int mtry_;
  std::mt19937_64 rng_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

DecisionTree DecisionTree::train(const FeatureMatrix& data,
                                 const TreeParams& p) {
  std::vector<std::size_t> idx(data.rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  DecisionTree t;
  t.nodes_ = TreeBuilder(data.rows, data.labels, p, 0, 0).build(std::move(idx));
  return t;
}

DecisionTree DecisionTree::train_subset(
    const std::vector<std::vector<double>>& x, const std::vector<int>& y,
    std::span<const std::size_t> indices, const TreeParams& p,
    int features_per_split, std::uint64_t seed) {
  DecisionTree t;
  t.nodes_ = TreeBuilder(x, y, p, features_per_split, seed)
                 .build({indices.begin(), indices.end()});
  return t;
}

int DecisionTree::predict(std::span<const double> row) const {
  int n = 0;
  while (nodes_[n].feature >= 0) {
    n = row[nodes_[n].feature] <= nodes_[n].threshold ? nodes_[n].left
                                                      : nodes_[n].right;
  }
  return nodes_[n].leaf_class;
}

void DecisionTree::save(std::ostream& out) const {
  out << "tree " << nodes_.size() << "\n";
  char buf[48];
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.feature < 0) {
      out << i << " leaf " << n.leaf_class << "\n";
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", n.threshold);
      out << i << " split " << n.feature << ' ' << buf << ' ' << n.left << ' '
          << n.right << "\n";
    }
  }
}

DecisionTree DecisionTree::load(std::istream& in) {
  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "tree") {
    throw std::runtime_error("bad tree model header");
  }
  DecisionTree t;
  t.nodes_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t id;
    std::string kind;
    if (!(in >> id >> kind) || id >= count) {
      throw std::runtime_error("bad tree model node");
    }
    Node& n = t.nodes_[id];
    if (kind == "leaf") {
      if (!(in >> n.leaf_class)) {
        throw std::runtime_error("bad tree model leaf");
      }
    } else if (kind == "split") {
      if (!(in >> n.feature >> n.threshold >> n.left >> n.right) ||
          n.feature < 0 || n.left < 0 || n.right < 0 ||
          std::size_t(n.left) >= count || std::size_t(n.right) >= count) {
        throw std::runtime_error("bad tree model split");
      }
    } else {
      throw std::runtime_error("bad tree model node kind: " + kind);
    }
  }
  return t;
}

RandomForest RandomForest::train(const FeatureMatrix& data,
                                 const ForestParams& p) {
  if (data.rows.empty()) {
    throw std::invalid_argument("cannot train a forest on zero samples");
  }
  if (p.n_trees <= 0) throw std::invalid_argument("n_trees must be positive");
  int mtry = p.features_per_split;
  if (mtry <= 0) {
    mtry = int(std::ceil(std::sqrt(double(data.n_features()))));
  }
  RandomForest forest;
  forest.trees_.resize(std::size_t(p.n_trees));
  const std::size_t n = data.rows.size();
  auto train_one = [&](int t) {
    const std::uint64_t tree_seed = p.seed + std::uint64_t(t);
    std::mt19937_64 rng(tree_seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> sample(n);
    if (p.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) sample[i] = pick(rng);
    } else {
      for (std::size_t i = 0; i < n; ++i) sample[i] = i;
    }
    forest.trees_[std::size_t(t)] = DecisionTree::train_subset(
        data.rows, data.labels, sample, p.tree, mtry, tree_seed ^ 0x9e3779b9);
  };
  if (p.n_threads <= 1) {
    for (int t = 0; t < p.n_trees; ++t) train_one(t);
  } else {
    std::vector<std::thread> pool;
    const int workers = std::min(p.n_threads, p.n_trees);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int t = w; t < p.n_trees; t += workers) train_one(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  return forest;
}

int RandomForest::predict(std::span<const double> row) const {
  int votes = 0;
  for (const DecisionTree& t : trees_) votes += t.predict(row);
  return votes > 0 ? 1 : -1;  // tie -> normal
}

void RandomForest::save(std::ostream& out) const {
  out << "forest " << trees_.size() << "\n";
  for (const DecisionTree& t : trees_) t.save(out);
}

RandomForest RandomForest::load(std::istream& in) {
  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "forest") {
    throw std::runtime_error("bad forest model header");
  }
  RandomForest f;
  f.trees_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    f.trees_.push_back(DecisionTree::load(in));
  }
  return f;
}

SplitIndices stratified_split(std::span<const int> labels, double train_frac,
                              std::uint64_t seed) {
  if (train_frac <= 0.0 || train_frac >= 1.0) {
    throw std::invalid_argument("train_frac must be in (0, 1)");
  }
  SplitIndices out;
  std::mt19937_64 rng(seed);
  for (int label : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n_train = std::size_t(train_frac * double(idx.size()));
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_train);
    out.test.insert(out.test.end(), idx.begin() + n_train, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

namespace {

double row_max(const std::vector<double>& row) {
  return *std::max_element(row.begin(), row.end());
}

FeatureMatrix select_rows(const FeatureMatrix& m,
                          std::span<const std::size_t> idx) {
  FeatureMatrix out;
  for (std::size_t i : idx) {
    out.users.push_back(m.users[i]);
    out.rows.push_back(m.rows[i]);
    out.labels.push_back(m.labels[i]);
  }
  return out;
}

DetectionMetrics eval_classifier(const FeatureMatrix& test,
                                 auto&& predict_row) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    const bool flagged = predict_row(test.rows[i]) == 1;
    if (test.labels[i] == 1) {
      flagged ? ++c.tp : ++c.fn;
    } else {
      flagged ? ++c.fp : ++c.tn;
    }
  }
  return compute_metrics(c);
}

}  // namespace

std::vector<SweepRow> evaluate_sweep(const FeatureMatrix& full,
                                     std::span<const double> rates,
                                     const SweepParams& params) {
  std::vector<std::size_t> confirmed_idx, normal_idx;
  for (std::size_t i = 0; i < full.labels.size(); ++i) {
    (full.labels[i] == 1 ? confirmed_idx : normal_idx).push_back(i);
  }
  std::vector<SweepRow> table;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    const double rate = rates[r];
    if (rate <= 0.0 || rate >= 1.0) {
      throw std::invalid_argument("infection rate must be in (0, 1)");
    }
    // keep every confirmed case when enough normals exist; otherwise
    // keep every normal and shrink the confirmed group
    std::size_t n_c = confirmed_idx.size();
    std::size_t n_n =
        std::size_t(std::llround(double(n_c) * (1.0 - rate) / rate));
    if (n_n > normal_idx.size()) {
      n_n = normal_idx.size();
      n_c = std::size_t(std::llround(double(n_n) * rate / (1.0 - rate)));
    }
    if (n_c == 0 || n_c > confirmed_idx.size() || n_n == 0) {
      throw std::invalid_argument("infection rate unattainable with this "
                                  "cohort");
    }
    std::mt19937_64 rng(params.seed + 1000003 * (r + 1));
    std::vector<std::size_t> c_sel = confirmed_idx;
    std::vector<std::size_t> n_sel = normal_idx;
    std::shuffle(c_sel.begin(), c_sel.end(), rng);
    std::shuffle(n_sel.begin(), n_sel.end(), rng);
    c_sel.resize(n_c);
    n_sel.resize(n_n);
    std::vector<std::size_t> cohort = c_sel;
    cohort.insert(cohort.end(), n_sel.begin(), n_sel.end());
    std::sort(cohort.begin(), cohort.end());
    FeatureMatrix m = select_rows(full, cohort);

    SweepRow row;
    row.rate = rate;
    row.n_confirmed = n_c;
    row.n_normal = n_n;
    SplitIndices split =
        stratified_split(m.labels, params.train_frac, params.seed + r);
    FeatureMatrix train = select_rows(m, split.train);
    FeatureMatrix test = select_rows(m, split.test);

    // threshold test: null distribution from the training normals
    std::vector<double> normal_scores;
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
      if (train.labels[i] == -1) normal_scores.push_back(row_max(train.rows[i]));
    }
    EmpiricalCdf cdf(std::move(normal_scores));
    const double threshold = cdf.critical_value(params.q);
    row.stat = eval_classifier(test, [&](const std::vector<double>& x) {
      return row_max(x) > threshold ? 1 : -1;
    });

    const auto t0 = std::chrono::steady_clock::now();
    DecisionTree tree = DecisionTree::train(train, params.forest.tree);
    const auto t1 = std::chrono::steady_clock::now();
    ForestParams fp = params.forest;
    fp.seed = params.seed + 7919 * (r + 1);
    RandomForest forest = RandomForest::train(train, fp);
    const auto t2 = std::chrono::steady_clock::now();
    row.tree_train_s = std::chrono::duration<double>(t1 - t0).count();
    row.forest_train_s = std::chrono::duration<double>(t2 - t1).count();

    row.tree = eval_classifier(
        test, [&](const std::vector<double>& x) { return tree.predict(x); });
    row.forest = eval_classifier(
        test, [&](const std::vector<double>& x) { return forest.predict(x); });
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace hires
