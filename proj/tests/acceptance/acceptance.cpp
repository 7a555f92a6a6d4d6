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

// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion. Exits nonzero if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "densd/alert.hpp"
#include "densd/boosting.hpp"
#include "densd/dataset.hpp"
#include "densd/eval.hpp"
#include "densd/features.hpp"
#include "densd/image_io.hpp"
#include "densd/kernels.hpp"
#include "densd/rng.hpp"
#include "densd/stages.hpp"
#include "densd/tuning.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace densd;

namespace {

// Collects failed checks for one criterion.
class Check {
 public:
  void That(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ |= !ok;
  }
  bool failed() const { return failed_; }
  std::string Summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<void(Check&)> run;
};

class ScratchDir {
 public:
  ScratchDir() {
    path_ = fs::temp_directory_path() / ("densd_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(DENSD_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Full-frame features of seeded synthetic frames, per_class of each level.
std::vector<DatasetRow> SyntheticRows(int per_class, std::uint64_t seed, LbpMode mode) {
  std::vector<DatasetRow> rows;
  for (int k = 0; k < kNumClasses; ++k) {
    for (int i = 0; i < per_class; ++i) {
      SynthSpec spec;
      spec.density = static_cast<Density>(k);
      const auto s = Synthesize(spec, Mix64(seed + static_cast<std::uint64_t>(k * per_class + i)));
      DatasetRow r;
      r.video_id = "v" + std::to_string(k);
      r.frame = i;
      r.region = s.frame.bounds();
      r.features = ExtractFeatures(s.frame, r.region, {128.0, mode});
      r.label = spec.density;
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<std::string> Names(std::span<const FeatureId> ids) {
  std::vector<std::string> out;
  for (auto id : ids) out.emplace_back(FeatureName(id));
  return out;
}

GrayFrame RandomFrame(Rng& rng, int w, int h) {
  GrayFrame f(w, h);
  const int levels = static_cast<int>(rng.Between(2, 256));
  for (auto& px : f.data()) {
    px = static_cast<std::uint8_t>(rng.Below(static_cast<std::uint64_t>(levels)) * 255 /
                                   static_cast<std::uint64_t>(levels - 1));
  }
  return f;
}

void ErrorPercentageFixture(Check& c) {
  ConfusionMatrix m(3, {4288, 50, 44, 0, 0, 0, 0, 0, 0});
  const double ep = ErrorPercentage(m);
  c.That(std::abs(ep - 2.1452) <= 1e-4, "error_percentage=" + std::to_string(ep));
  ConfusionMatrix spread(3, {1500, 20, 10, 15, 1400, 10, 9, 30, 1388});
  c.That(spread.trace() == 4288 && spread.total() == 4382, "fixture totals");
  c.That(std::abs(ErrorPercentage(spread) - 2.1452) <= 1e-4, "spread matrix");
}

void AugmentRatio(Check& c) {
  const GrayFrame tiny(4, 4, std::uint8_t{100});
  const FrameSource source = [&](const std::string&, int) { return tiny; };
  std::vector<DatasetRow> rows(43721);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].video_id = "v";
    rows[i].frame = static_cast<int>(i);
    rows[i].region = {0, 0, 4, 4};
    rows[i].label = static_cast<Density>(i % 3);
  }
  const auto out = Augment(rows, source, {});
  c.That(out.size() == 131163, "augmented rows=" + std::to_string(out.size()));
  std::size_t originals = 0;
  for (const auto& r : out) originals += r.origin == Origin::kOriginal;
  c.That(originals == rows.size(), "original rows preserved");
}

void RelabelRule(Check& c) {
  std::vector<DatasetRow> rows(2);
  rows[0].features.edge_density = 64.5000;
  rows[0].label = Density::kModerate;
  rows[1].features.edge_density = 64.5001;
  rows[1].label = Density::kModerate;
  const std::size_t changed = ThresholdRelabel(rows, 64.5);
  c.That(changed == 1, "changed=" + std::to_string(changed));
  c.That(rows[0].label == Density::kModerate, "64.5000 unchanged");
  c.That(rows[1].label == Density::kVeryDense, "64.5001 very_dense");
}

void ConstantImportance(Check& c) {
  const auto rows = SyntheticRows(40, 11, LbpMode::kPaper);
  const auto ids = DefaultFeatureSet(false);
  const auto model = GbmFit(BuildMatrix(rows, ids), LabelIndices(rows), GbmParams{}, Names(ids));
  const auto it = std::find(ids.begin(), ids.end(), FeatureId::kLbpTexture);
  c.That(it != ids.end(), "lbp_texture in default feature set");
  if (it == ids.end()) return;
  const double imp = model.importances[static_cast<std::size_t>(it - ids.begin())];
  c.That(imp == 0.0, "lbp_texture importance=" + std::to_string(imp));
}

void TreeOracleEquivalence(Check& c) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(Mix64(seed + 977));
    const auto n = static_cast<std::size_t>(rng.Between(1, 50));
    const auto d = static_cast<std::size_t>(rng.Between(1, 3));
    FeatureMatrix x(n, d);
    for (std::size_t j = 0; j < d; ++j) {
      const bool discrete = rng.Below(2) == 0;
      for (std::size_t i = 0; i < n; ++i) {
        x(i, j) = discrete ? static_cast<double>(rng.Below(4)) : rng.Uniform() * 10.0 - 5.0;
      }
    }
    std::vector<double> r, h;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rng.Uniform() * 2.0 - 1.0;
      r.push_back(v);
      h.push_back(std::abs(v) * (1.0 - std::abs(v)));
    }
    TreeParams p;
    p.max_depth = static_cast<int>(rng.Between(1, 6));
    p.min_samples_split = static_cast<int>(rng.Between(2, 5));
    const Tree expected = oracle::TreeOracle(x, r, h, p).Fit();
    c.That(oracle::SameTree(FitTree(x, r, h, p), expected), "dataset " + std::to_string(seed));
  }
}

void GradientCheck(Check& c) {
  constexpr double kStep = 1e-6;
  for (std::uint64_t state = 0; state < 20; ++state) {
    Rng rng(Mix64(state + 31));
    const std::size_t n = 1 + rng.Below(8);
    std::vector<double> scores(n * 3);
    std::vector<int> y(n);
    for (auto& s : scores) s = rng.Uniform() * 8.0 - 4.0;
    for (auto& v : y) v = static_cast<int>(rng.Below(3));
    const auto r = SoftmaxResiduals(scores, y, 3);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      auto up = scores, down = scores;
      up[i] += kStep;
      down[i] -= kStep;
      const double grad =
          (MultinomialDeviance(up, y, 3) - MultinomialDeviance(down, y, 3)) / (2.0 * kStep);
      const double diff = std::abs(r[i] + static_cast<double>(n) * grad);
      c.That(diff <= 1e-5, "state " + std::to_string(state) + " diff " + std::to_string(diff));
    }
  }
}

void LossMonotonicity(Check& c) {
  const auto rows = SyntheticRows(60, 23, LbpMode::kPaper);
  const auto ids = DefaultFeatureSet(false);
  for (double lr : {0.1, 0.05}) {
    GbmParams p;
    p.n_estimators = 200;
    p.learning_rate = lr;
    FitTrace trace;
    GbmFit(BuildMatrix(rows, ids), LabelIndices(rows), p, Names(ids), kNumClasses, &trace);
    c.That(trace.deviance.size() == 201, "trace length");
    for (std::size_t i = 1; i < trace.deviance.size(); ++i) {
      c.That(trace.deviance[i] <= trace.deviance[i - 1] + 1e-12,
             "lr " + std::to_string(lr) + " round " + std::to_string(i));
    }
  }
}

void EndToEnd(Check& c, const fs::path& scratch) {
  stages::SynthOptions so;
  so.out_dir = scratch / "e2e_data";
  so.per_class = 100;
  so.test_per_class = 30;
  so.seed = 42;
  const auto s = stages::Synth(so);
  const auto summary =
      stages::Pipeline({s.labels, s.test_labels, {}, scratch / "e2e_out", RunConfig{}});
  const auto& r = summary.report;
  c.That(r.matrix.total() == 90, "test rows=" + std::to_string(r.matrix.total()));
  c.That(r.accuracy >= 0.90, "accuracy=" + std::to_string(r.accuracy));
  c.That(r.error_percentage <= 10.0, "error_percentage=" + std::to_string(r.error_percentage));
  c.That(r.matrix.at(2, 0) == 0, "very_dense->moderate=" + std::to_string(r.matrix.at(2, 0)));
}

void GridShape(Check& c, const fs::path& scratch) {
  auto rows = SyntheticRows(167, 57, LbpMode::kPaper);
  rows.resize(500);
  const auto ids = DefaultFeatureSet(false);
  const FeatureMatrix x = BuildMatrix(rows, ids);
  const auto y = LabelIndices(rows);
  const ParamGrid grid = ParamGrid::Reference();
  c.That(grid.size() == 75, "grid size=" + std::to_string(grid.size()));
  const CvResult result = GridSearch(x, y, grid, Names(ids), 5, 99);
  c.That(result.table.size() == 75, "table size=" + std::to_string(result.table.size()));
  const fs::path table = scratch / "cv_table.csv";
  WriteCvTable(table, result);
  const std::string text = ReadFile(table);
  const auto lines = std::count(text.begin(), text.end(), '\n');
  c.That(lines == 76, "cv table lines=" + std::to_string(lines));

  // Ranking the same results in shuffled candidate order must pick the same best.
  Rng rng(5);
  const GbmParams best = result.best_result().params;
  auto shuffled = result.table;
  for (int t = 0; t < 20; ++t) {
    rng.Shuffle(std::span<CandidateResult>(shuffled));
    const auto it = std::min_element(shuffled.begin(), shuffled.end(), BetterCandidate);
    c.That(it->params == best, "permutation " + std::to_string(t));
  }
  ParamGrid reversed = grid;
  std::reverse(reversed.n_estimators.begin(), reversed.n_estimators.end());
  std::reverse(reversed.learning_rate.begin(), reversed.learning_rate.end());
  std::reverse(reversed.max_depth.begin(), reversed.max_depth.end());
  const CvResult again = GridSearch(x, y, reversed, Names(ids), 5, 99);
  c.That(again.best_result().params == best, "reversed axes change the best candidate");
}

void RoundTrip(Check& c, const fs::path& scratch) {
  const auto rows = SyntheticRows(30, 71, LbpMode::kMeanCode);
  const auto ids = DefaultFeatureSet(true);
  GbmParams p;
  p.n_estimators = 60;
  const auto model = GbmFit(BuildMatrix(rows, ids), LabelIndices(rows), p, Names(ids));
  SaveModel(model, scratch / "model.json");
  const auto loaded = LoadModel(scratch / "model.json");
  Rng rng(8);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> v(ids.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const auto id = ids[j];
      const double scale = id == FeatureId::kArea ? 1e5 : id == FeatureId::kLbpTexture ? 1.0 : 320.0;
      v[j] = rng.Uniform() * scale;
    }
    const auto a = PredictProba(model, v);
    const auto b = PredictProba(loaded, v);
    const auto da = DecisionFunction(model, v);
    const auto db = DecisionFunction(loaded, v);
    mismatches += !(a == b && da == db && Predict(model, v) == Predict(loaded, v));
  }
  c.That(mismatches == 0, "mismatching vectors=" + std::to_string(mismatches));
  c.That(ModelToJson(loaded) == ModelToJson(model), "re-serialized model differs");
}

void KernelOracles(Check& c) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(Mix64(seed + 4242));
    const GrayFrame f = RandomFrame(rng, 16, 16);
    const std::string tag = "frame " + std::to_string(seed);
    const auto sobel = oracle::SobelMagnitude(f);
    c.That(SobelMagnitude(f) == sobel, tag + " sobel");
    c.That(kernels::serial::SobelMagnitude(f, f.bounds()) == sobel, tag + " serial sobel");
    c.That(kernels::omp::SobelMagnitude(f, f.bounds()) == sobel, tag + " omp sobel");
    for (int y = 1; y < 15; ++y) {
      for (int x = 1; x < 15; ++x) {
        c.That(LbpCode(f, x, y) == oracle::LbpCode(f, x, y), tag + " lbp code");
      }
    }
    const Rect r{static_cast<int>(rng.Below(6)), static_cast<int>(rng.Below(6)),
                 3 + static_cast<int>(rng.Below(8)), 3 + static_cast<int>(rng.Below(8))};
    for (const Rect& region : {f.bounds(), r}) {
      const auto expected = oracle::LbpHistogram(f, region);
      c.That(ComputeLbpHistogram(f, region).bins == expected, tag + " lbp histogram");
      c.That(kernels::serial::LbpHistogram(f, region) == kernels::omp::LbpHistogram(f, region),
             tag + " serial/omp lbp counts");
    }
  }
}

void ScalerInvariants(Check& c) {
  const auto rows = SyntheticRows(30, 91, LbpMode::kPaper);
  const auto split = Split(rows, 0.2, 3);
  const auto ids = DefaultFeatureSet(true);
  const FeatureMatrix x = BuildMatrix(split.train, ids);
  const ScalerParams p = ScalerFit(x);
  const FeatureMatrix z = ScalerApply(p, x);
  const double n = static_cast<double>(z.rows());
  bool saw_constant = false;
  for (std::size_t col = 0; col < z.cols(); ++col) {
    const std::string name(FeatureName(ids[col]));
    if (p.IsConstant(col)) {
      saw_constant = true;
      for (std::size_t i = 0; i < z.rows(); ++i) c.That(z(i, col) == 0.0, name + " not zero");
      continue;
    }
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) mean += z(i, col);
    mean /= n;
    for (std::size_t i = 0; i < z.rows(); ++i) var += (z(i, col) - mean) * (z(i, col) - mean);
    c.That(std::abs(mean) <= 1e-9, name + " mean=" + std::to_string(mean));
    c.That(std::abs(std::sqrt(var / n) - 1.0) <= 1e-9, name + " std");
  }
  c.That(saw_constant, "no constant feature in fixture");
}

void AlertFixture(Check& c, const fs::path& scratch) {
  const GrayFrame gray(16, 12, std::uint8_t{200});
  const RgbFrame tinted = Annotate(gray, Density::kVeryDense, {}, 0);
  c.That(tinted.at(8, 6) == (Rgb{219, 130, 130}), "blend pixel");
  c.That(tinted.at(0, 0) == (Rgb{255, 0, 0}), "border pixel");

  const fs::path in = scratch / "alert_in";
  fs::create_directories(in);
  std::vector<FramePrediction> preds;
  for (int i = 0; i < 4; ++i) {
    WriteImage(in / FrameFileName(i), gray);
    FramePrediction p;
    p.frame = i;
    p.label = Density::kVeryDense;
    p.probabilities = {0.0, 0.0, 1.0};
    preds.push_back(p);
  }
  c.That(FlashPhases(preds) == std::vector<int>{0, 1, 2, 3}, "flash phases");
  EmitAnnotatedSequence(preds, in, scratch / "alert_out", {});
  const RgbFrame off = Annotate(gray, Density::kVeryDense, {}, 1);
  for (int i = 0; i < 4; ++i) {
    const auto img = ReadImage(scratch / "alert_out" / FrameFileName(i));
    const auto* rgb = std::get_if<RgbFrame>(&img);
    c.That(rgb != nullptr, "frame " + std::to_string(i) + " not RGB");
    if (!rgb) continue;
    c.That(*rgb == (i % 2 == 0 ? tinted : off), "frame " + std::to_string(i) + " bytes");
  }
}

void Determinism(Check& c, const fs::path& scratch) {
  const fs::path data = scratch / "det_data";
  c.That(RunCli("--seed 17 synth --out " + data.string() + " --per-class 40 --test-per-class 10") ==
             0,
         "synth");
  const auto run = [&](const std::string& name, int jobs) {
    const fs::path out = scratch / name;
    const int rc = RunCli("--seed 17 --jobs " + std::to_string(jobs) + " pipeline --labels " +
                          (data / "labels.csv").string() + " --test-labels " +
                          (data / "test_labels.csv").string() + " --out " + out.string());
    c.That(rc == 0, name + " exit " + std::to_string(rc));
    return std::make_pair(ReadFile(out / "model.json"), ReadFile(out / "report.json"));
  };
  const auto a = run("det_j1_a", 1);
  const auto b = run("det_j1_b", 1);
  const auto d = run("det_j4", 4);
  c.That(!a.first.empty() && !a.second.empty(), "missing outputs");
  c.That(a == b, "repeat run at jobs 1 differs");
  c.That(a == d, "jobs 4 differs from jobs 1");
}

}  // namespace

int main() {
  ScratchDir scratch;
  const fs::path dir = scratch.path();
  const std::vector<Criterion> criteria = {
      {1, "error percentage fixture", 1, ErrorPercentageFixture},
      {2, "augmentation ratio", 60, AugmentRatio},
      {3, "relabel rule", 1, RelabelRule},
      {4, "constant feature importance", 10, ConstantImportance},
      {5, "tree oracle equivalence", 60, TreeOracleEquivalence},
      {6, "gradient check", 10, GradientCheck},
      {7, "loss monotonicity", 60, LossMonotonicity},
      {8, "end-to-end synthetic accuracy", 300, [&](Check& c) { EndToEnd(c, dir); }},
      {9, "grid search shape", 600, [&](Check& c) { GridShape(c, dir); }},
      {10, "round-trip persistence", 10, [&](Check& c) { RoundTrip(c, dir); }},
      {11, "kernel oracles", 10, KernelOracles},
      {12, "scaling invariants", 1, ScalerInvariants},
      {13, "alert rendering fixture", 1, [&](Check& c) { AlertFixture(c, dir); }},
      {14, "determinism across jobs", 600, [&](Check& c) { Determinism(c, dir); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.That(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.That(secs <= cr.budget_s, "over time budget");
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs/%gs", secs, cr.budget_s);
    std::cout << (check.failed() ? "FAIL" : "PASS") << "  " << cr.id << ". " << cr.name << " ("
              << timing << ")";
    if (check.failed()) std::cout << ": " << check.Summary();
    std::cout << std::endl;
    failed += check.failed();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
