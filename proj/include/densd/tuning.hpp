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

#include "densd/boosting.hpp"
#include "densd/matrix.hpp"

namespace densd {

struct ParamGrid {
  std::vector<int> n_estimators;
  std::vector<double> learning_rate;
  std::vector<int> max_depth;

  // 50/100/200 estimators x 0.01..0.5 learning rate x depth 3..7.
  static ParamGrid Reference();

  std::size_t size() const { return n_estimators.size() * learning_rate.size() * max_depth.size(); }
  void Validate() const;

  // Canonical order: estimators outermost, then learning rate, then depth.
  // Fields not on the grid come from base.
  std::vector<GbmParams> Candidates(const GbmParams& base = {}) const;
};

// k disjoint folds. Within each class the indices are shuffled and dealt
// round-robin, so per-class fold sizes differ by at most one. Each fold is
// returned in ascending index order.
std::vector<std::vector<std::size_t>> StratifiedKFold(std::span<const int> labels, int k,
                                                      std::uint64_t seed);

struct CandidateResult {
  GbmParams params;
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double std = 0.0;  // population
};

struct CvResult {
  std::vector<CandidateResult> table;  // canonical candidate order
  std::size_t best = 0;
  std::size_t fits = 0;
  int folds = 0;

  const CandidateResult& best_result() const { return table[best]; }
};

// Higher mean accuracy wins; ties go to fewer estimators, then smaller
// max_depth, then smaller learning rate.
bool BetterCandidate(const CandidateResult& a, const CandidateResult& b);

// Exhaustive k-fold search scored by accuracy. The scaler is refit inside
// every training fold (GbmFit does that).
CvResult GridSearch(const FeatureMatrix& x, std::span<const int> y, const ParamGrid& grid,
                    const std::vector<std::string>& feature_names, int k, std::uint64_t seed,
                    const GbmParams& base = {}, int num_classes = kNumClasses);

void WriteCvTable(const std::filesystem::path& path, const CvResult& result);

struct CurvePoint {
  std::size_t n_estimators = 0;
  double train_mean = 0.0;
  double train_std = 0.0;
  double val_mean = 0.0;
  double val_std = 0.0;
};

// Train/validation accuracy at each checkpoint from prefix-truncated
// ensembles: one fit per fold, no refits per checkpoint.
std::vector<CurvePoint> LearningCurve(const FeatureMatrix& x, std::span<const int> y,
                                      const GbmParams& params,
                                      const std::vector<std::string>& feature_names,
                                      std::span<const std::size_t> checkpoints, int k,
                                      std::uint64_t seed, int num_classes = kNumClasses);

// Accuracy of the prefix ensemble with `rounds` rounds on every row of x.
std::vector<double> StagedAccuracy(const GbmModel& model, const FeatureMatrix& x_raw,
                                   std::span<const int> y,
                                   std::span<const std::size_t> checkpoints);

void WriteCurve(const std::filesystem::path& path, std::span<const CurvePoint> points);

}  // namespace densd
