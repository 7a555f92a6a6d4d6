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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "densd/dataset.hpp"
#include "densd/features.hpp"
#include "densd/matrix.hpp"

namespace densd {

// Flat-array node. Internal nodes send x[feature] <= threshold to left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output
  double gain = 0.0;   // SSE reduction of the split (internal nodes)
  std::uint64_t count = 0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Regression tree; nodes are stored in preorder with the root at index 0.
struct Tree {
  std::vector<TreeNode> nodes;

  double Predict(std::span<const double> x) const;
  int Depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

// |leaf value| never exceeds this after the Newton step.
inline constexpr double kLeafCap = 1e6;

struct TreeParams {
  int max_depth = 3;
  int min_samples_split = 2;
  double leaf_epsilon = 1e-10;
  int num_classes = 3;
};

// Column orderings by (value, row index), computed once per training matrix
// and reused by every tree fit on it.
class SortedColumns {
 public:
  explicit SortedColumns(const FeatureMatrix& x);
  const std::vector<std::uint32_t>& order(std::size_t feature) const { return orders_[feature]; }

 private:
  std::vector<std::vector<std::uint32_t>> orders_;
};

// Greedy least-squares CART on residuals with Newton leaf values
// ((K-1)/K) * sum(r) / (sum(h) + leaf_epsilon), capped at kLeafCap.
//
// Candidate thresholds are midpoints between consecutive distinct values of a
// feature; a midpoint that rounds up onto the upper value falls back to the
// lower one. Gains within 1e-9 * sum(r^2) of the current best count as ties,
// which go to the lower feature index and then the lower threshold. A node
// becomes a leaf at max_depth, below min_samples_split samples, or when the
// best gain is <= 1e-10 * sum(r^2). Leaf and node sums run over samples in
// ascending row order.
Tree FitTree(const FeatureMatrix& x, std::span<const double> residuals,
             std::span<const double> hessians, const TreeParams& params);
Tree FitTree(const FeatureMatrix& x, const SortedColumns& sorted,
             std::span<const double> residuals, std::span<const double> hessians,
             const TreeParams& params);

inline constexpr double kRelativeTieTolerance = 1e-9;
inline constexpr double kRelativeMinGain = 1e-10;

struct GbmParams {
  int n_estimators = 200;
  double learning_rate = 0.5;
  int max_depth = 7;
  int min_samples_split = 2;
  double leaf_epsilon = 1e-10;

  void Validate() const;
  friend bool operator==(const GbmParams&, const GbmParams&) = default;
};

struct GbmModel {
  GbmParams params;
  int num_classes = kNumClasses;
  std::vector<std::string> feature_names;
  std::vector<double> init_scores;
  std::vector<std::vector<Tree>> trees;  // [round][class]
  ScalerParams scaler;
  std::vector<double> importances;
  // Extraction settings the model was trained with.
  FeatureOptions feature_options;

  std::size_t rounds() const { return trees.size(); }
  std::size_t num_features() const { return feature_names.size(); }
};

// Multinomial deviance bookkeeping, filled when passed to GbmFit.
struct FitTrace {
  std::vector<double> deviance;  // [0] at init, then after each round
};

// Multiclass gradient boosting on raw features: fits the scaler, then boosts
// one tree per class per round on the softmax residuals. Deterministic.
GbmModel GbmFit(const FeatureMatrix& x_raw, std::span<const int> y, const GbmParams& params,
                std::vector<std::string> feature_names, int num_classes = kNumClasses,
                FitTrace* trace = nullptr);

std::vector<double> Softmax(std::span<const double> logits);

// Mean over samples of logsumexp(F_i) - F_i[y_i]; scores is n x K row-major.
double MultinomialDeviance(std::span<const double> scores, std::span<const int> y, int num_classes);

// r_ik = 1{y_i = k} - softmax(F_i)_k, n x K row-major.
std::vector<double> SoftmaxResiduals(std::span<const double> scores, std::span<const int> y,
                                     int num_classes);

// Raw class scores from the first `rounds` rounds (all rounds by default).
std::vector<double> DecisionFunction(const GbmModel& model, std::span<const double> x_raw,
                                     std::size_t rounds = SIZE_MAX);

// Softmax of the scores, floored so saturated logits stay inside (0, 1).
inline constexpr double kProbabilityFloor = 1e-15;
std::vector<double> PredictProba(const GbmModel& model, std::span<const double> x_raw,
                                 std::size_t rounds = SIZE_MAX);
int Predict(const GbmModel& model, std::span<const double> x_raw, std::size_t rounds = SIZE_MAX);

// Index of the largest value; ties go to the lowest index.
int ArgMax(std::span<const double> values);

// Per-feature total SSE reduction over all splits, normalized to sum to 1
// (all zeros when the ensemble never splits).
std::vector<double> FeatureImportance(const GbmModel& model);

inline constexpr std::string_view kModelFormatVersion = "1";

std::string ModelToJson(const GbmModel& model);
GbmModel ModelFromJson(const std::string& text);
void SaveModel(const GbmModel& model, const std::filesystem::path& path);
GbmModel LoadModel(const std::filesystem::path& path);

// Resolves model.feature_names to FeatureIds; throws kIncompatibleModel for
// names this build does not know.
std::vector<FeatureId> ModelFeatureIds(const GbmModel& model);

}  // namespace densd
