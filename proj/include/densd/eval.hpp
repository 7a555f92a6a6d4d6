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

namespace densd {

// Rows are the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = kNumClasses);
  ConfusionMatrix(int num_classes, std::vector<std::uint64_t> counts);

  int num_classes() const { return k_; }
  std::uint64_t at(int truth, int predicted) const { return counts_[Index(truth, predicted)]; }
  std::uint64_t& at(int truth, int predicted) { return counts_[Index(truth, predicted)]; }

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(int truth) const;
  std::uint64_t col_sum(int predicted) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t Index(int t, int p) const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(p);
  }

  int k_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix BuildConfusionMatrix(std::span<const int> y_true, std::span<const int> y_pred,
                                     int num_classes = kNumClasses);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;  // true instances
};

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  ConfusionMatrix matrix;
  double accuracy = 0.0;
  double error_percentage = 0.0;
  std::vector<ClassMetrics> per_class;
  AveragedMetrics macro;
  AveragedMetrics weighted;
  AveragedMetrics micro;
  // One line per metric that hit a zero denominator and was reported as 0.
  std::vector<std::string> warnings;
};

// Zero denominators yield 0 and a warning. Throws kEmptyEvaluation when the
// matrix is empty.
EvalReport ComputeMetrics(const ConfusionMatrix& matrix);

// 100 * misclassified / total.
double ErrorPercentage(const ConfusionMatrix& matrix);

std::string ReportToJson(const EvalReport& report);
std::string ReportToText(const EvalReport& report);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::vector<std::uint64_t> class_counts;
};

struct FeatureHistogram {
  FeatureId feature = FeatureId::kEdgeDensity;
  std::vector<HistogramBin> bins;
};

// Equal-width bins over the observed range, counted per class. The maximum
// lands in the last bin; a degenerate range puts everything in the first.
FeatureHistogram FeatureHistogramReport(std::span<const DatasetRow> rows, FeatureId feature,
                                        int bins);

// CSV feature,bin_low,bin_high,class,count.
void WriteHistogramCsv(const std::filesystem::path& path,
                       std::span<const FeatureHistogram> histograms);

}  // namespace densd
