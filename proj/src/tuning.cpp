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

#include "densd/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "densd/csv.hpp"
#include "densd/error.hpp"
#include "densd/parallel.hpp"
#include "densd/rng.hpp"

namespace densd {

namespace {

std::pair<double, double> MeanStd(std::span<const double> values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

std::vector<std::size_t> Complement(std::size_t n, std::span<const std::size_t> fold) {
  std::vector<bool> held_out(n, false);
  for (const auto i : fold) held_out[i] = true;
  std::vector<std::size_t> rest;
  rest.reserve(n - fold.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!held_out[i]) rest.push_back(i);
  }
  return rest;
}

std::vector<int> Gather(std::span<const int> y, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (const auto i : idx) out.push_back(y[i]);
  return out;
}

double Accuracy(const GbmModel& model, const FeatureMatrix& x, std::span<const int> y) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (Predict(model, x.row(i)) == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

}  // namespace

ParamGrid ParamGrid::Reference() {
  return {{50, 100, 200}, {0.01, 0.05, 0.1, 0.3, 0.5}, {3, 4, 5, 6, 7}};
}

void ParamGrid::Validate() const {
  Require(!n_estimators.empty() && !learning_rate.empty() && !max_depth.empty(),
          ErrorCode::kInvalidArgument, "every grid axis needs at least one value");
}

std::vector<GbmParams> ParamGrid::Candidates(const GbmParams& base) const {
  Validate();
  std::vector<GbmParams> out;
  out.reserve(size());
  for (const int ne : n_estimators) {
    for (const double lr : learning_rate) {
      for (const int depth : max_depth) {
        GbmParams p = base;
        p.n_estimators = ne;
        p.learning_rate = lr;
        p.max_depth = depth;
        p.Validate();
        out.push_back(p);
      }
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> StratifiedKFold(std::span<const int> labels, int k,
                                                      std::uint64_t seed) {
  Require(k >= 2, ErrorCode::kInvalidArgument, "k-fold needs k >= 2");
  int max_label = -1;
  for (const int l : labels) {
    Require(l >= 0, ErrorCode::kInvalidArgument, "negative label");
    max_label = std::max(max_label, l);
  }
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_label + 1));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }

  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  Rng rng(seed);
  std::size_t next = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& pool = members[c];
    if (pool.empty()) continue;
    Require(pool.size() >= static_cast<std::size_t>(k), ErrorCode::kInsufficientData,
            "class " + std::to_string(c) + " has " + std::to_string(pool.size()) +
                " members, fewer than k=" + std::to_string(k));
    rng.Shuffle(std::span<std::size_t>(pool));
    for (const auto i : pool) {
      folds[next].push_back(i);
      next = (next + 1) % folds.size();
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

bool BetterCandidate(const CandidateResult& a, const CandidateResult& b) {
  if (a.mean != b.mean) return a.mean > b.mean;
  if (a.params.n_estimators != b.params.n_estimators) {
    return a.params.n_estimators < b.params.n_estimators;
  }
  if (a.params.max_depth != b.params.max_depth) return a.params.max_depth < b.params.max_depth;
  return a.params.learning_rate < b.params.learning_rate;
}

CvResult GridSearch(const FeatureMatrix& x, std::span<const int> y, const ParamGrid& grid,
                    const std::vector<std::string>& feature_names, int k, std::uint64_t seed,
                    const GbmParams& base, int num_classes) {
  Require(x.rows() == y.size(), ErrorCode::kInvalidArgument, "GridSearch: size mismatch");
  const auto candidates = grid.Candidates(base);
  const auto folds = StratifiedKFold(y, k, seed);

  struct Split {
    FeatureMatrix train_x;
    std::vector<int> train_y;
    FeatureMatrix val_x;
    std::vector<int> val_y;
  };
  std::vector<Split> splits;
  for (const auto& fold : folds) {
    const auto train = Complement(x.rows(), fold);
    splits.push_back({x.Select(train), Gather(y, train), x.Select(fold), Gather(y, fold)});
  }

  const std::size_t nk = folds.size();
  std::vector<double> accuracy(candidates.size() * nk, 0.0);
  ParallelFor(accuracy.size(), [&](std::size_t job) {
    const auto& params = candidates[job / nk];
    const auto& s = splits[job % nk];
    const GbmModel model = GbmFit(s.train_x, s.train_y, params, feature_names, num_classes);
    accuracy[job] = Accuracy(model, s.val_x, s.val_y);
  });

  CvResult result;
  result.folds = static_cast<int>(nk);
  result.fits = accuracy.size();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    CandidateResult row;
    row.params = candidates[c];
    row.fold_accuracy.assign(accuracy.begin() + static_cast<std::ptrdiff_t>(c * nk),
                             accuracy.begin() + static_cast<std::ptrdiff_t>((c + 1) * nk));
    std::tie(row.mean, row.std) = MeanStd(row.fold_accuracy);
    result.table.push_back(std::move(row));
  }
  for (std::size_t c = 1; c < result.table.size(); ++c) {
    if (BetterCandidate(result.table[c], result.table[result.best])) result.best = c;
  }
  return result;
}

void WriteCvTable(const std::filesystem::path& path, const CvResult& result) {
  auto out = csv::OpenOutput(path);
  out << "n_estimators,learning_rate,max_depth";
  for (int f = 0; f < result.folds; ++f) out << ",fold_" << f;
  out << ",mean,std\n";
  for (const auto& row : result.table) {
    out << row.params.n_estimators << ',' << csv::Fixed6(row.params.learning_rate) << ','
        << row.params.max_depth;
    for (const double a : row.fold_accuracy) out << ',' << csv::Fixed6(a);
    out << ',' << csv::Fixed6(row.mean) << ',' << csv::Fixed6(row.std) << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<double> StagedAccuracy(const GbmModel& model, const FeatureMatrix& x_raw,
                                   std::span<const int> y,
                                   std::span<const std::size_t> checkpoints) {
  std::vector<std::size_t> correct(checkpoints.size(), 0);
  const auto k = static_cast<std::size_t>(model.num_classes);
  for (std::size_t i = 0; i < x_raw.rows(); ++i) {
    const auto z = ScalerApply(model.scaler, x_raw.row(i));
    std::vector<double> scores = model.init_scores;
    std::size_t round = 0;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      for (; round < checkpoints[c]; ++round) {
        for (std::size_t j = 0; j < k; ++j) {
          scores[j] += model.params.learning_rate * model.trees[round][j].Predict(z);
        }
      }
      if (ArgMax(Softmax(scores)) == y[i]) ++correct[c];
    }
  }
  std::vector<double> acc(checkpoints.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    acc[c] = static_cast<double>(correct[c]) / static_cast<double>(x_raw.rows());
  }
  return acc;
}

std::vector<CurvePoint> LearningCurve(const FeatureMatrix& x, std::span<const int> y,
                                      const GbmParams& params,
                                      const std::vector<std::string>& feature_names,
                                      std::span<const std::size_t> checkpoints, int k,
                                      std::uint64_t seed, int num_classes) {
  Require(!checkpoints.empty(), ErrorCode::kInvalidArgument, "no checkpoints given");
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    Require(checkpoints[c] >= 1 &&
                checkpoints[c] <= static_cast<std::size_t>(params.n_estimators),
            ErrorCode::kInvalidArgument, "checkpoints must lie in [1, n_estimators]");
    Require(c == 0 || checkpoints[c] > checkpoints[c - 1], ErrorCode::kInvalidArgument,
            "checkpoints must be strictly ascending");
  }
  const auto folds = StratifiedKFold(y, k, seed);
  const std::size_t nk = folds.size();
  std::vector<std::vector<double>> train_acc(nk), val_acc(nk);
  ParallelFor(nk, [&](std::size_t f) {
    const auto train = Complement(x.rows(), folds[f]);
    const FeatureMatrix tx = x.Select(train);
    const auto ty = Gather(y, train);
    const GbmModel model = GbmFit(tx, ty, params, feature_names, num_classes);
    train_acc[f] = StagedAccuracy(model, tx, ty, checkpoints);
    val_acc[f] = StagedAccuracy(model, x.Select(folds[f]), Gather(y, folds[f]), checkpoints);
  });

  std::vector<CurvePoint> points;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::vector<double> tr, va;
    for (std::size_t f = 0; f < nk; ++f) {
      tr.push_back(train_acc[f][c]);
      va.push_back(val_acc[f][c]);
    }
    CurvePoint p;
    p.n_estimators = checkpoints[c];
    std::tie(p.train_mean, p.train_std) = MeanStd(tr);
    std::tie(p.val_mean, p.val_std) = MeanStd(va);
    points.push_back(p);
  }
  return points;
}

void WriteCurve(const std::filesystem::path& path, std::span<const CurvePoint> points) {
  auto out = csv::OpenOutput(path);
  out << "n_estimators,train_mean,train_std,val_mean,val_std\n";
  for (const auto& p : points) {
    out << p.n_estimators << ',' << csv::Fixed6(p.train_mean) << ',' << csv::Fixed6(p.train_std)
        << ',' << csv::Fixed6(p.val_mean) << ',' << csv::Fixed6(p.val_std) << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace densd
