/*
 * Copyright 2026 The hajj-densd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "densd/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "densd/error.hpp"

namespace densd {

double Tree::Predict(std::span<const double> x) const {
  int i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].value;
}

int Tree::Depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> depth(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[nodes[i].left] = depth[i] + 1;
      depth[nodes[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

SortedColumns::SortedColumns(const FeatureMatrix& x) : orders_(x.cols()) {
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = orders_[f];
    order.resize(x.rows());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double va = x(a, f), vb = x(b, f);
      return va != vb ? va < vb : a < b;
    });
  }
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const double> r, std::span<const double> h,
              const TreeParams& params)
      : x_(x), r_(r), h_(h), params_(params) {}

  Tree Build(std::vector<std::uint32_t> rows, std::vector<std::vector<std::uint32_t>> sorted) {
    Grow(std::move(rows), std::move(sorted), 0);
    return std::move(tree_);
  }

 private:
  double LeafValue(const std::vector<std::uint32_t>& rows) const {
    double sum_r = 0.0, sum_h = 0.0;
    for (const auto i : rows) {
      sum_r += r_[i];
      sum_h += h_[i];
    }
    const double k = params_.num_classes;
    const double v = ((k - 1.0) / k) * sum_r / (sum_h + params_.leaf_epsilon);
    return std::clamp(v, -kLeafCap, kLeafCap);
  }

  SplitChoice FindSplit(const std::vector<std::uint32_t>& rows,
                        const std::vector<std::vector<std::uint32_t>>& sorted,
                        double sum_sq) const {
    const std::size_t n = rows.size();
    double total = 0.0;
    for (const auto i : rows) total += r_[i];
    const double parent = total * total / static_cast<double>(n);
    const double tie = kRelativeTieTolerance * sum_sq;

    SplitChoice best;
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      const auto& order = sorted[f];
      double left = 0.0;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        left += r_[order[j]];
        const double a = x_(order[j], f);
        const double b = x_(order[j + 1], f);
        if (!(a < b)) continue;
        const auto n_left = static_cast<double>(j + 1);
        const auto n_right = static_cast<double>(n - j - 1);
        const double right = total - left;
        const double gain = left * left / n_left + right * right / n_right - parent;
        if (gain > best.gain + tie) {
          double t = 0.5 * (a + b);
          if (!(t < b)) t = a;
          best = {static_cast<int>(f), t, gain};
        }
      }
    }
    return best;
  }

  int Grow(std::vector<std::uint32_t> rows, std::vector<std::vector<std::uint32_t>> sorted,
           int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[id].count = rows.size();
    tree_.nodes[id].value = LeafValue(rows);

    if (depth >= params_.max_depth || rows.size() < static_cast<std::size_t>(params_.min_samples_split)) {
      return id;
    }
    double sum_sq = 0.0;
    for (const auto i : rows) sum_sq += r_[i] * r_[i];
    const SplitChoice split = FindSplit(rows, sorted, sum_sq);
    if (split.feature < 0 || !(split.gain > kRelativeMinGain * sum_sq)) return id;

    const auto goes_left = [&](std::uint32_t i) {
      return x_(i, split.feature) <= split.threshold;
    };
    std::vector<std::uint32_t> left_rows, right_rows;
    for (const auto i : rows) (goes_left(i) ? left_rows : right_rows).push_back(i);
    std::vector<std::vector<std::uint32_t>> left_sorted(sorted.size()), right_sorted(sorted.size());
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      left_sorted[f].reserve(left_rows.size());
      right_sorted[f].reserve(right_rows.size());
      for (const auto i : sorted[f]) (goes_left(i) ? left_sorted[f] : right_sorted[f]).push_back(i);
    }
    rows.clear();
    rows.shrink_to_fit();
    sorted.clear();

    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    tree_.nodes[id].gain = split.gain;
    tree_.nodes[id].value = 0.0;
    const int l = Grow(std::move(left_rows), std::move(left_sorted), depth + 1);
    const int r = Grow(std::move(right_rows), std::move(right_sorted), depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  const FeatureMatrix& x_;
  std::span<const double> r_;
  std::span<const double> h_;
  TreeParams params_;
  Tree tree_;
};

void CheckTreeInputs(const FeatureMatrix& x, std::span<const double> residuals,
                     std::span<const double> hessians, const TreeParams& params) {
  Require(x.rows() >= 1, ErrorCode::kInvalidArgument, "FitTree: empty input");
  Require(residuals.size() == x.rows() && hessians.size() == x.rows(),
          ErrorCode::kInvalidArgument, "FitTree: residual/hessian length mismatch");
  Require(params.max_depth >= 1, ErrorCode::kInvalidArgument, "max_depth must be >= 1");
  Require(params.min_samples_split >= 2, ErrorCode::kInvalidArgument,
          "min_samples_split must be >= 2");
  Require(params.num_classes >= 2, ErrorCode::kInvalidArgument, "num_classes must be >= 2");
}

}  // namespace

Tree FitTree(const FeatureMatrix& x, std::span<const double> residuals,
             std::span<const double> hessians, const TreeParams& params) {
  CheckTreeInputs(x, residuals, hessians, params);
  return FitTree(x, SortedColumns(x), residuals, hessians, params);
}

Tree FitTree(const FeatureMatrix& x, const SortedColumns& sorted,
             std::span<const double> residuals, std::span<const double> hessians,
             const TreeParams& params) {
  CheckTreeInputs(x, residuals, hessians, params);
  std::vector<std::uint32_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0u);
  std::vector<std::vector<std::uint32_t>> orders(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) orders[f] = sorted.order(f);
  return TreeBuilder(x, residuals, hessians, params).Build(std::move(rows), std::move(orders));
}

void GbmParams::Validate() const {
  Require(n_estimators >= 1, ErrorCode::kInvalidArgument, "n_estimators must be >= 1");
  Require(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorCode::kInvalidArgument,
          "learning_rate must be > 0");
  Require(max_depth >= 1, ErrorCode::kInvalidArgument, "max_depth must be >= 1");
  Require(min_samples_split >= 2, ErrorCode::kInvalidArgument, "min_samples_split must be >= 2");
  Require(std::isfinite(leaf_epsilon) && leaf_epsilon >= 0.0, ErrorCode::kInvalidArgument,
          "leaf_epsilon must be finite and >= 0");
}

std::vector<double> Softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - peak);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

double MultinomialDeviance(std::span<const double> scores, std::span<const int> y,
                           int num_classes) {
  const auto k = static_cast<std::size_t>(num_classes);
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto row = scores.subspan(i * k, k);
    const double peak = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (const double f : row) sum += std::exp(f - peak);
    total += peak + std::log(sum) - row[static_cast<std::size_t>(y[i])];
  }
  return total / static_cast<double>(y.size());
}

std::vector<double> SoftmaxResiduals(std::span<const double> scores, std::span<const int> y,
                                     int num_classes) {
  const auto k = static_cast<std::size_t>(num_classes);
  std::vector<double> r(scores.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto p = Softmax(scores.subspan(i * k, k));
    for (std::size_t c = 0; c < k; ++c) {
      r[i * k + c] = (static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0) - p[c];
    }
  }
  return r;
}

GbmModel GbmFit(const FeatureMatrix& x_raw, std::span<const int> y, const GbmParams& params,
                std::vector<std::string> feature_names, int num_classes, FitTrace* trace) {
  params.Validate();
  Require(num_classes >= 2, ErrorCode::kInvalidArgument, "num_classes must be >= 2");
  Require(x_raw.rows() == y.size(), ErrorCode::kInvalidArgument,
          "GbmFit: feature rows and labels differ in length");
  Require(feature_names.size() == x_raw.cols(), ErrorCode::kInvalidArgument,
          "GbmFit: feature_names does not match the column count");
  const std::size_t n = y.size();
  const auto k = static_cast<std::size_t>(num_classes);

  std::vector<std::size_t> counts(k, 0);
  for (const int label : y) {
    Require(label >= 0 && label < num_classes, ErrorCode::kInvalidArgument,
            "GbmFit: label out of range: " + std::to_string(label));
    ++counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < k; ++c) {
    Require(counts[c] > 0, ErrorCode::kEmptyClass,
            "GbmFit: class " + std::to_string(c) + " has no samples");
  }
  for (std::size_t r = 0; r < x_raw.rows(); ++r) {
    for (const double v : x_raw.row(r)) {
      Require(std::isfinite(v), ErrorCode::kInvalidArgument,
              "GbmFit: non-finite feature in row " + std::to_string(r));
    }
  }

  GbmModel model;
  model.params = params;
  model.num_classes = num_classes;
  model.feature_names = std::move(feature_names);
  model.scaler = ScalerFit(x_raw);
  const FeatureMatrix x = ScalerApply(model.scaler, x_raw);
  const SortedColumns sorted(x);

  model.init_scores.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    model.init_scores[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
  }
  std::vector<double> scores(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(model.init_scores.begin(), model.init_scores.end(), scores.begin() + i * k);
  }
  if (trace) trace->deviance.assign(1, MultinomialDeviance(scores, y, num_classes));

  const TreeParams tree_params{params.max_depth, params.min_samples_split, params.leaf_epsilon,
                               num_classes};
  model.trees.reserve(static_cast<std::size_t>(params.n_estimators));
  std::vector<std::vector<double>> residuals(k, std::vector<double>(n));
  std::vector<std::vector<double>> hessians(k, std::vector<double>(n));
  for (int m = 0; m < params.n_estimators; ++m) {
    const auto r = SoftmaxResiduals(scores, y, num_classes);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        const double v = r[i * k + c];
        residuals[c][i] = v;
        hessians[c][i] = std::abs(v) * (1.0 - std::abs(v));
      }
    }

    // The K trees of a round only read this round's residuals.
    std::vector<Tree> round(k);
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < k; ++c) {
      round[c] = FitTree(x, sorted, residuals[c], hessians[c], tree_params);
    }

    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      for (std::size_t c = 0; c < k; ++c) {
        scores[i * k + c] += params.learning_rate * round[c].Predict(row);
      }
    }
    model.trees.push_back(std::move(round));
    if (trace) trace->deviance.push_back(MultinomialDeviance(scores, y, num_classes));
  }

  model.importances = FeatureImportance(model);
  return model;
}

std::vector<double> DecisionFunction(const GbmModel& model, std::span<const double> x_raw,
                                     std::size_t rounds) {
  Require(x_raw.size() == model.num_features(), ErrorCode::kInvalidArgument,
          "model expects " + std::to_string(model.num_features()) + " features, got " +
              std::to_string(x_raw.size()));
  const auto z = ScalerApply(model.scaler, x_raw);
  std::vector<double> scores = model.init_scores;
  const std::size_t used = std::min(rounds, model.rounds());
  for (std::size_t m = 0; m < used; ++m) {
    for (std::size_t c = 0; c < scores.size(); ++c) {
      scores[c] += model.params.learning_rate * model.trees[m][c].Predict(z);
    }
  }
  return scores;
}

std::vector<double> PredictProba(const GbmModel& model, std::span<const double> x_raw,
                                 std::size_t rounds) {
  auto p = Softmax(DecisionFunction(model, x_raw, rounds));
  // Keep every probability strictly inside (0, 1) when the logits saturate.
  const auto top = static_cast<std::size_t>(ArgMax(p));
  bool floored = false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k != top && p[k] < kProbabilityFloor) {
      p[k] = kProbabilityFloor;
      floored = true;
    }
  }
  if (floored) {
    double rest = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) rest += k == top ? 0.0 : p[k];
    p[top] = 1.0 - rest;
  }
  return p;
}

int Predict(const GbmModel& model, std::span<const double> x_raw, std::size_t rounds) {
  return ArgMax(DecisionFunction(model, x_raw, rounds));
}

int ArgMax(std::span<const double> values) {
  int best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

std::vector<double> FeatureImportance(const GbmModel& model) {
  std::vector<double> total(model.num_features(), 0.0);
  for (const auto& round : model.trees) {
    for (const auto& tree : round) {
      for (const auto& node : tree.nodes) {
        if (!node.is_leaf()) total[static_cast<std::size_t>(node.feature)] += node.gain;
      }
    }
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0) {
    for (auto& v : total) v /= sum;
  }
  return total;
}

std::vector<FeatureId> ModelFeatureIds(const GbmModel& model) {
  std::vector<FeatureId> ids;
  for (const auto& name : model.feature_names) {
    const auto id = ParseFeatureName(name);
    Require(id.has_value(), ErrorCode::kIncompatibleModel, "model uses unknown feature '" + name + "'");
    ids.push_back(*id);
  }
  return ids;
}

}  // namespace densd
