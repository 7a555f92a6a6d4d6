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

#include "densd/stages.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "densd/csv.hpp"
#include "densd/error.hpp"
#include "densd/image_io.hpp"
#include "densd/parallel.hpp"
#include "densd/rng.hpp"
#include "densd/version.hpp"

namespace densd::stages {

std::uint64_t StageSeed(std::uint64_t master, std::string_view stage) {
  return DeriveSeed(master, stage);
}

namespace {

std::vector<std::string> FeatureNames(std::span<const FeatureId> ids) {
  std::vector<std::string> names;
  for (const FeatureId id : ids) names.emplace_back(FeatureName(id));
  return names;
}

void WriteText(const fs::path& path, const std::string& text) {
  auto out = csv::OpenOutput(path);
  out << text;
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "failed writing " + path.string());
}

// Writes one corpus split: labels are shuffled, then cut into contiguous
// per-video chunks so each video mixes levels in runs of varying length.
std::size_t SynthSplit(const SynthOptions& o, const std::string& prefix, int per_class,
                       std::uint64_t seed, const fs::path& labels_path) {
  std::vector<Density> order;
  for (int k = 0; k < kNumClasses; ++k) {
    order.insert(order.end(), static_cast<std::size_t>(per_class), *DensityFromIndex(k));
  }
  Rng rng(DeriveSeed(seed, "order"));
  rng.Shuffle(std::span<Density>(order));

  const std::size_t n = order.size();
  const std::size_t videos = std::max<std::size_t>(1, std::min<std::size_t>(o.videos, n));
  std::vector<LabeledRegion> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = i * videos / n;
    const std::size_t first = (v * n + videos - 1) / videos;
    char vid[32];
    std::snprintf(vid, sizeof vid, "%s_%02zu", prefix.c_str(), v);
    labels[i] = {vid, static_cast<int>(i - first), {0, 0, o.spec.width, o.spec.height}, order[i]};
  }

  for (const auto& l : labels) {
    std::error_code ec;
    fs::create_directories(o.out_dir / l.video_id, ec);
    if (ec) Fail(ErrorCode::kIo, "cannot create " + (o.out_dir / l.video_id).string());
  }
  const std::uint64_t frame_base = DeriveSeed(seed, "frames");
  ParallelFor(n, [&](std::size_t i) {
    SynthSpec spec = o.spec;
    spec.density = labels[i].label;
    spec.head_count.reset();
    const SynthFrame f = Synthesize(spec, Mix64(frame_base + i));
    WriteImage(o.out_dir / labels[i].video_id / FrameFileName(labels[i].frame), f.frame);
  });
  WriteLabels(labels_path, labels);
  return n;
}

void WriteHistograms(const fs::path& path, std::span<const DatasetRow> rows, int bins) {
  std::vector<FeatureHistogram> hists;
  for (const FeatureId id : kAllFeatures) hists.push_back(FeatureHistogramReport(rows, id, bins));
  WriteHistogramCsv(path, hists);
}

FeatureMatrix TrainMatrix(const SplitResult& data, bool use_position, std::vector<int>& y,
                          std::vector<std::string>& names) {
  const auto ids = DefaultFeatureSet(use_position);
  names = FeatureNames(ids);
  y = LabelIndices(data.train);
  return BuildMatrix(data.train, ids);
}

}  // namespace

SynthSummary Synth(const SynthOptions& o) {
  Require(o.per_class >= 1, ErrorCode::kInvalidArgument, "per-class frame count must be >= 1");
  Require(o.test_per_class >= 0, ErrorCode::kInvalidArgument, "test frame count must be >= 0");
  Require(o.videos >= 1, ErrorCode::kInvalidArgument, "video count must be >= 1");
  Require(o.spec.width >= 3 && o.spec.height >= 3, ErrorCode::kInvalidArgument,
          "synthetic frames must be at least 3x3");

  SynthSummary summary;
  const std::uint64_t seed = StageSeed(o.seed, "synth");
  const bool held_out = o.test_per_class > 0;
  summary.labels = o.out_dir / "labels.csv";
  summary.frames = SynthSplit(o, held_out ? "train" : "video", o.per_class,
                              DeriveSeed(seed, "train"), summary.labels);
  if (held_out) {
    summary.test_labels = o.out_dir / "test_labels.csv";
    summary.frames += SynthSplit(o, "test", o.test_per_class, DeriveSeed(seed, "test"),
                                 *summary.test_labels);
  }
  return summary;
}

std::size_t Extract(const ExtractOptions& o) {
  const auto labels = ParseLabels(o.labels);
  const auto regions = DedupPerFrame(labels);
  const auto rows = ExtractRows(regions, DirectoryFrameSource(o.frames_root), o.features);
  WriteFeatureCsv(o.out, rows);
  if (o.histograms) WriteHistograms(*o.histograms, rows, o.histogram_bins);
  return rows.size();
}

std::size_t ExtractDirectory(const fs::path& frames_dir, std::optional<Region> region,
                             const FeatureOptions& features, const fs::path& out) {
  const auto files = ListFrames(frames_dir);
  Require(!files.empty(), ErrorCode::kEmptyInput,
          "no frame files found in " + frames_dir.string());
  const std::string video_id = frames_dir.filename().string();
  std::vector<DatasetRow> rows(files.size());
  ParallelFor(files.size(), [&](std::size_t i) {
    const GrayFrame frame = ReadGray(files[i].path);
    DatasetRow& row = rows[i];
    row.video_id = video_id;
    row.frame = files[i].index;
    row.region = ClipRegion(frame, region.value_or(frame.bounds()));
    row.features = ExtractFeatures(frame, row.region, features);
  });
  WriteFeatureCsv(out, rows, false);
  return rows.size();
}

PrepareSummary Prepare(const PrepareOptions& o) {
  PrepareSummary summary;
  auto rows = ReadFeatureCsv(o.features);
  summary.relabeled = ThresholdRelabel(rows, o.relabel_tau);

  SplitResult split;
  if (o.test_features) {
    split.train = std::move(rows);
    split.test = ReadFeatureCsv(*o.test_features);
    summary.relabeled += ThresholdRelabel(split.test, o.relabel_tau);
  } else {
    split = Split(rows, o.test_fraction, StageSeed(o.seed, "split"));
  }
  summary.train_original = split.train.size();

  const auto augmented = Augment(split.train, DirectoryFrameSource(o.frames_root), o.augment);
  split.train = Oversample(augmented, StageSeed(o.seed, "oversample"));
  summary.train_rows = split.train.size();
  summary.test_rows = split.test.size();
  WritePreparedCsv(o.out, split);
  return summary;
}

GbmModel Train(const TrainOptions& o) {
  const auto data = ReadPreparedCsv(o.prepared);
  std::vector<int> y;
  std::vector<std::string> names;
  const FeatureMatrix x = TrainMatrix(data, o.use_position, y, names);
  GbmModel model = GbmFit(x, y, o.params, names);
  model.feature_options = o.features;
  SaveModel(model, o.out);
  return model;
}

CvResult Grid(const GridOptions& o) {
  const auto data = ReadPreparedCsv(o.prepared);
  std::vector<int> y;
  std::vector<std::string> names;
  const FeatureMatrix x = TrainMatrix(data, o.use_position, y, names);
  CvResult result = GridSearch(x, y, o.grid, names, o.folds, StageSeed(o.seed, "cv"), o.base);
  WriteCvTable(o.out, result);
  return result;
}

std::vector<CurvePoint> Curve(const CurveOptions& o) {
  const auto data = ReadPreparedCsv(o.prepared);
  std::vector<int> y;
  std::vector<std::string> names;
  const FeatureMatrix x = TrainMatrix(data, o.use_position, y, names);
  std::vector<std::size_t> checkpoints = o.checkpoints;
  if (checkpoints.empty()) {
    const auto n = static_cast<std::size_t>(o.params.n_estimators);
    const std::size_t step = std::max<std::size_t>(1, n / 10);
    checkpoints.push_back(1);
    for (std::size_t c = step; c < n; c += step) {
      if (c > 1) checkpoints.push_back(c);
    }
    if (n > 1) checkpoints.push_back(n);
  }
  const auto points =
      LearningCurve(x, y, o.params, names, checkpoints, o.folds, StageSeed(o.seed, "curve"));
  WriteCurve(o.out, points);
  return points;
}

EvalReport Evaluate(const EvaluateOptions& o) {
  const GbmModel model = LoadModel(o.model);
  const auto data = ReadPreparedCsv(o.prepared);
  const auto ids = ModelFeatureIds(model);
  std::vector<int> truth(data.test.size());
  std::vector<int> predicted(data.test.size());
  ParallelFor(data.test.size(), [&](std::size_t i) {
    truth[i] = ToIndex(data.test[i].label);
    predicted[i] = Predict(model, SelectFeatures(data.test[i].features, ids));
  });
  const EvalReport report = ComputeMetrics(BuildConfusionMatrix(truth, predicted));
  WriteText(o.out_json, ReportToJson(report));
  if (o.out_text) WriteText(*o.out_text, ReportToText(report));
  return report;
}

SequenceResult PredictFrames(const PredictOptions& o) {
  const GbmModel model = LoadModel(o.model);
  SequenceResult result = ClassifySequence(model, o.frames_dir, o.region, o.continue_on_error);
  WritePredictionsCsv(o.out, result.predictions);
  return result;
}

std::size_t AnnotateFrames(const AnnotateOptions& o) {
  o.style.Validate();
  const auto predictions = ReadPredictionsCsv(o.predictions);
  return EmitAnnotatedSequence(predictions, o.frames_dir, o.out_dir, o.style);
}

namespace {

nlohmann::ordered_json ConfigJson(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["edge_threshold"] = c.edge_threshold;
  j["relabel_tau"] = c.relabel_tau;
  j["rotation_deg"] = c.rotation_deg;
  j["brightness_factor"] = c.brightness_factor;
  j["lbp_mode"] = std::string(LbpModeName(c.lbp_mode));
  j["use_position"] = c.use_position;
  j["test_fraction"] = c.test_fraction;
  j["cv_folds"] = c.cv_folds;
  j["tune"] = c.tune;
  j["grid_estimators"] = c.grid.n_estimators;
  j["grid_lr"] = c.grid.learning_rate;
  j["grid_depth"] = c.grid.max_depth;
  j["n_estimators"] = c.gbm.n_estimators;
  j["learning_rate"] = c.gbm.learning_rate;
  j["max_depth"] = c.gbm.max_depth;
  j["min_samples_split"] = c.gbm.min_samples_split;
  j["tint_alpha"] = c.alert.tint_alpha;
  j["border_px"] = c.alert.border_px;
  j["flash_period"] = c.alert.flash_period;
  j["histogram_bins"] = c.histogram_bins;
  j["continue_on_error"] = c.continue_on_error;
  j["jobs"] = c.jobs;
  return j;
}

// Tracks artifacts so a failed run can flag what it left behind.
class ArtifactLog {
 public:
  explicit ArtifactLog(fs::path root) : root_(std::move(root)) {}

  fs::path Add(const fs::path& relative) {
    paths_.push_back(relative);
    return root_ / relative;
  }

  template <typename Fn>
  void Run(const std::string& stage, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      MarkPartial();
      Fail(e.code(), "stage '" + stage + "' failed: " + e.what());
    } catch (const std::exception& e) {
      MarkPartial();
      Fail(ErrorCode::kInternal, "stage '" + stage + "' failed: " + e.what());
    }
  }

  const std::vector<fs::path>& paths() const { return paths_; }

 private:
  void MarkPartial() const {
    for (const auto& rel : paths_) {
      const fs::path p = root_ / rel;
      std::error_code ec;
      if (fs::exists(p, ec)) fs::rename(p, fs::path(p.string() + ".partial"), ec);
    }
  }

  fs::path root_;
  std::vector<fs::path> paths_;
};

}  // namespace

PipelineSummary Pipeline(const PipelineOptions& o) {
  const RunConfig& c = o.config;
  c.Validate();
  SetJobs(c.jobs);
  const fs::path frames_root =
      o.frames_root.empty() ? o.labels.parent_path() : o.frames_root;
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create output directory " + o.out_dir.string());

  PipelineSummary summary;
  ArtifactLog log(o.out_dir);

  const fs::path features = log.Add("features.csv");
  const fs::path histograms = log.Add("feature_histograms.csv");
  log.Run("extract", [&] {
    Extract({o.labels, frames_root, features, c.feature_options(), histograms, c.histogram_bins});
  });
  std::optional<fs::path> test_features;
  if (o.test_labels) {
    test_features = log.Add("test_features.csv");
    log.Run("extract", [&] {
      Extract({*o.test_labels, frames_root, *test_features, c.feature_options(), std::nullopt,
               c.histogram_bins});
    });
  }

  const fs::path prepared = log.Add("prepared.csv");
  log.Run("prepare", [&] {
    Prepare({features, test_features, frames_root, prepared, c.relabel_tau, c.test_fraction,
             {c.rotation_deg, c.brightness_factor, c.feature_options()}, c.seed});
  });

  GbmParams params = c.gbm;
  if (c.tune) {
    const fs::path table = log.Add("cv_table.csv");
    log.Run("grid", [&] {
      summary.cv = Grid({prepared, table, c.grid, c.cv_folds, c.gbm, c.use_position, c.seed});
      params = summary.cv->best_result().params;
    });
  }

  const fs::path model = log.Add("model.json");
  log.Run("train", [&] { Train({prepared, model, params, c.use_position, c.feature_options()}); });

  const fs::path report_json = log.Add("report.json");
  const fs::path report_text = log.Add("report.txt");
  log.Run("evaluate",
          [&] { summary.report = Evaluate({model, prepared, report_json, report_text}); });

  // Annotate every video that contributed held-out rows, using the labeled
  // region when the video has exactly one.
  log.Run("annotate", [&] {
    const auto data = ReadPreparedCsv(prepared);
    std::map<std::string, std::set<std::tuple<int, int, int, int>>> videos;
    for (const auto& row : data.test) {
      const Region& r = row.region;
      videos[row.video_id].insert({r.x, r.y, r.w, r.h});
    }
    for (const auto& [video, regions] : videos) {
      std::optional<Region> region;
      if (regions.size() == 1) {
        const auto& [x, y, w, h] = *regions.begin();
        region = Region{x, y, w, h};
      }
      const fs::path preds = log.Add(fs::path("predictions") / (video + ".csv"));
      const fs::path out = log.Add(fs::path("annotated") / video);
      PredictFrames({model, frames_root / video, region, preds, c.continue_on_error});
      AnnotateFrames({preds, frames_root / video, out, c.alert});
    }
  });

  const fs::path manifest = log.Add("manifest.json");
  log.Run("manifest", [&] {
    nlohmann::ordered_json j;
    j["version"] = std::string(kVersion);
    j["model_format"] = std::string(kModelFormatVersion);
    j["seed"] = c.seed;
    j["config"] = ConfigJson(c);
    j["inputs"] = {{"labels", o.labels.string()},
                   {"test_labels", o.test_labels ? o.test_labels->string() : ""},
                   {"frames_root", frames_root.string()}};
    j["trained_params"] = {{"n_estimators", params.n_estimators},
                           {"learning_rate", params.learning_rate},
                           {"max_depth", params.max_depth},
                           {"min_samples_split", params.min_samples_split}};
    std::vector<std::string> paths;
    for (const auto& p : log.paths()) paths.push_back(p.generic_string());
    j["artifacts"] = paths;
    WriteText(manifest, j.dump(2) + "\n");
  });

  for (const auto& p : log.paths()) summary.artifacts.push_back(o.out_dir / p);
  return summary;
}

}  // namespace densd::stages
