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

#include "densd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "densd/csv.hpp"
#include "densd/error.hpp"

namespace densd {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : k_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(num_classes), 0) {
  Require(num_classes >= 1, ErrorCode::kInvalidArgument, "confusion matrix needs >= 1 class");
}

ConfusionMatrix::ConfusionMatrix(int num_classes, std::vector<std::uint64_t> counts)
    : k_(num_classes), counts_(std::move(counts)) {
  Require(num_classes >= 1 && counts_.size() == static_cast<std::size_t>(num_classes) *
                                                     static_cast<std::size_t>(num_classes),
          ErrorCode::kInvalidArgument, "confusion matrix counts must be K*K");
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto c : counts_) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (int k = 0; k < k_; ++k) t += at(k, k);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(int truth) const {
  std::uint64_t s = 0;
  for (int p = 0; p < k_; ++p) s += at(truth, p);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(int predicted) const {
  std::uint64_t s = 0;
  for (int t = 0; t < k_; ++t) s += at(t, predicted);
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  Require(other.k_ == k_, ErrorCode::kInvalidArgument, "confusion matrix size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix BuildConfusionMatrix(std::span<const int> y_true, std::span<const int> y_pred,
                                     int num_classes) {
  Require(y_true.size() == y_pred.size(), ErrorCode::kInvalidArgument,
          "y_true and y_pred differ in length");
  ConfusionMatrix m(num_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    Require(y_true[i] >= 0 && y_true[i] < num_classes && y_pred[i] >= 0 &&
                y_pred[i] < num_classes,
            ErrorCode::kInvalidArgument, "label out of range at index " + std::to_string(i));
    ++m.at(y_true[i], y_pred[i]);
  }
  return m;
}

namespace {

double Ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double Harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::string ClassName(int k) {
  const auto d = DensityFromIndex(k);
  return d ? std::string(DensityName(*d)) : "class_" + std::to_string(k);
}

}  // namespace

double ErrorPercentage(const ConfusionMatrix& matrix) {
  const auto total = matrix.total();
  Require(total > 0, ErrorCode::kEmptyEvaluation, "cannot compute error percentage of an empty matrix");
  return 100.0 * static_cast<double>(total - matrix.trace()) / static_cast<double>(total);
}

EvalReport ComputeMetrics(const ConfusionMatrix& matrix) {
  const auto total = matrix.total();
  Require(total > 0, ErrorCode::kEmptyEvaluation, "cannot evaluate an empty confusion matrix");
  EvalReport report;
  report.matrix = matrix;
  report.accuracy = Ratio(matrix.trace(), total);
  report.error_percentage = ErrorPercentage(matrix);

  const int k = matrix.num_classes();
  for (int c = 0; c < k; ++c) {
    ClassMetrics m;
    const auto tp = matrix.at(c, c);
    const auto predicted = matrix.col_sum(c);
    m.support = matrix.row_sum(c);
    m.precision = Ratio(tp, predicted);
    m.recall = Ratio(tp, m.support);
    m.f1 = Harmonic(m.precision, m.recall);
    if (predicted == 0) {
      report.warnings.push_back("precision of '" + ClassName(c) + "' has no predicted instances; reported as 0");
    }
    if (m.support == 0) {
      report.warnings.push_back("recall of '" + ClassName(c) + "' has no true instances; reported as 0");
    }
    report.per_class.push_back(m);

    report.macro.precision += m.precision / k;
    report.macro.recall += m.recall / k;
    report.macro.f1 += m.f1 / k;
    const double w = static_cast<double>(m.support) / static_cast<double>(total);
    report.weighted.precision += w * m.precision;
    report.weighted.recall += w * m.recall;
    report.weighted.f1 += w * m.f1;
  }
  // Single-label: every false positive is someone else's false negative.
  report.micro.precision = report.accuracy;
  report.micro.recall = report.accuracy;
  report.micro.f1 = report.accuracy;
  return report;
}

std::string ReportToJson(const EvalReport& report) {
  using nlohmann::json;
  const int k = report.matrix.num_classes();
  json matrix = json::array();
  for (int t = 0; t < k; ++t) {
    json row = json::array();
    for (int p = 0; p < k; ++p) row.push_back(report.matrix.at(t, p));
    matrix.push_back(std::move(row));
  }
  json per_class = json::array();
  for (int c = 0; c < k; ++c) {
    const auto& m = report.per_class[static_cast<std::size_t>(c)];
    per_class.push_back({{"class", ClassName(c)},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  const auto avg = [](const AveragedMetrics& a) {
    return json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
  };
  json doc = {
      {"matrix_orientation", "rows=true,columns=predicted"},
      {"classes", json::array()},
      {"confusion_matrix", std::move(matrix)},
      {"total", report.matrix.total()},
      {"accuracy", report.accuracy},
      {"error_percentage", report.error_percentage},
      {"per_class", std::move(per_class)},
      {"macro", avg(report.macro)},
      {"weighted", avg(report.weighted)},
      {"micro", avg(report.micro)},
      {"warnings", report.warnings},
  };
  for (int c = 0; c < k; ++c) doc["classes"].push_back(ClassName(c));
  return doc.dump(2) + "\n";
}

std::string ReportToText(const EvalReport& report) {
  std::ostringstream out;
  const int k = report.matrix.num_classes();
  char buf[160];
  out << "Confusion matrix (rows = true class, columns = predicted class)\n";
  out << "                ";
  for (int p = 0; p < k; ++p) {
    std::snprintf(buf, sizeof(buf), "%12s", ClassName(p).c_str());
    out << buf;
  }
  out << '\n';
  for (int t = 0; t < k; ++t) {
    std::snprintf(buf, sizeof(buf), "%-16s", ClassName(t).c_str());
    out << buf;
    for (int p = 0; p < k; ++p) {
      std::snprintf(buf, sizeof(buf), "%12llu", static_cast<unsigned long long>(report.matrix.at(t, p)));
      out << buf;
    }
    out << '\n';
  }
  std::snprintf(buf, sizeof(buf), "\naccuracy          %.4f\nerror percentage  %.4f%%\n",
                report.accuracy, report.error_percentage);
  out << buf;
  out << "\nclass            precision    recall        f1   support\n";
  for (int c = 0; c < k; ++c) {
    const auto& m = report.per_class[static_cast<std::size_t>(c)];
    std::snprintf(buf, sizeof(buf), "%-16s %9.4f %9.4f %9.4f %9llu\n", ClassName(c).c_str(),
                  m.precision, m.recall, m.f1, static_cast<unsigned long long>(m.support));
    out << buf;
  }
  const std::pair<const char*, const AveragedMetrics*> averages[] = {
      {"macro", &report.macro}, {"weighted", &report.weighted}, {"micro", &report.micro}};
  for (const auto& [name, a] : averages) {
    std::snprintf(buf, sizeof(buf), "%-16s %9.4f %9.4f %9.4f\n", name, a->precision, a->recall,
                  a->f1);
    out << buf;
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

FeatureHistogram FeatureHistogramReport(std::span<const DatasetRow> rows, FeatureId feature,
                                        int bins) {
  Require(!rows.empty(), ErrorCode::kEmptyEvaluation, "histogram of zero rows");
  Require(bins >= 1, ErrorCode::kInvalidArgument, "histogram needs at least one bin");
  double lo = FeatureValue(rows[0].features, feature);
  double hi = lo;
  for (const auto& r : rows) {
    const double v = FeatureValue(r.features, feature);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double width = (hi - lo) / bins;

  FeatureHistogram h;
  h.feature = feature;
  for (int b = 0; b < bins; ++b) {
    HistogramBin bin;
    bin.low = lo + width * b;
    bin.high = b + 1 == bins ? hi : lo + width * (b + 1);
    bin.class_counts.assign(kNumClasses, 0);
    h.bins.push_back(std::move(bin));
  }
  for (const auto& r : rows) {
    const double v = FeatureValue(r.features, feature);
    int b = 0;
    if (width > 0.0) {
      b = std::clamp(static_cast<int>(std::floor((v - lo) / width)), 0, bins - 1);
    }
    ++h.bins[static_cast<std::size_t>(b)].class_counts[static_cast<std::size_t>(ToIndex(r.label))];
  }
  return h;
}

void WriteHistogramCsv(const std::filesystem::path& path,
                       std::span<const FeatureHistogram> histograms) {
  auto out = csv::OpenOutput(path);
  out << "feature,bin_low,bin_high,class,count\n";
  for (const auto& h : histograms) {
    for (const auto& bin : h.bins) {
      for (int c = 0; c < kNumClasses; ++c) {
        out << FeatureName(h.feature) << ',' << csv::Fixed6(bin.low) << ','
            << csv::Fixed6(bin.high) << ',' << kDensityNames[c] << ','
            << bin.class_counts[static_cast<std::size_t>(c)] << '\n';
      }
    }
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace densd
