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

#include <cstring>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "densd/config.hpp"
#include "densd/error.hpp"
#include "densd/parallel.hpp"
#include "densd/stages.hpp"
#include "densd/version.hpp"

namespace {

using densd::ErrorCode;
using densd::RunConfig;
namespace st = densd::stages;
namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 5;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitUsage;
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kInternal:
      return kExitInternal;
    default:
      return kExitData;
  }
}

std::optional<densd::Rect> ParseRegion(const std::string& text) {
  int v[4];
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d,%d%c", &v[0], &v[1], &v[2], &v[3], &tail) != 4) {
    densd::Fail(ErrorCode::kConfig, "region must be x,y,w,h, got '" + text + "'");
  }
  return densd::Rect{v[0], v[1], v[2], v[3]};
}

// --config must be known before the other flags bind, so that flag values
// land on top of file values.
std::optional<std::string> FindConfigArg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return std::string(argv[i + 1]);
    if (std::strncmp(argv[i], "--config=", 9) == 0) return std::string(argv[i] + 9);
  }
  return std::nullopt;
}

struct LbpModeOption {
  std::string text;
  void Apply(RunConfig& c) const {
    if (text.empty()) return;
    const auto mode = densd::ParseLbpMode(text);
    if (!mode) densd::Fail(ErrorCode::kConfig, "lbp-mode must be 'paper' or 'mean-code'");
    c.lbp_mode = *mode;
  }
};

void AddFeatureFlags(CLI::App* cmd, RunConfig& c, LbpModeOption& lbp) {
  cmd->add_option("--edge-threshold", c.edge_threshold, "Sobel magnitude edge threshold");
  cmd->add_option("--lbp-mode", lbp.text, "paper | mean-code");
}

void AddGbmFlags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--n-estimators", c.gbm.n_estimators, "Boosting rounds");
  cmd->add_option("--learning-rate", c.gbm.learning_rate, "Shrinkage");
  cmd->add_option("--max-depth", c.gbm.max_depth, "Tree depth limit");
  cmd->add_option("--min-samples-split", c.gbm.min_samples_split, "Smallest splittable node");
  cmd->add_flag("--use-position", c.use_position, "Include x_center and y_center");
}

void AddGridFlags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--grid-estimators", c.grid.n_estimators, "Comma-separated")->delimiter(',');
  cmd->add_option("--grid-lr", c.grid.learning_rate, "Comma-separated")->delimiter(',');
  cmd->add_option("--grid-depth", c.grid.max_depth, "Comma-separated")->delimiter(',');
  cmd->add_option("--cv-folds", c.cv_folds, "Stratified folds");
}

void AddPrepareFlags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--relabel-tau", c.relabel_tau, "Edge density above which rows become very_dense");
  cmd->add_option("--test-fraction", c.test_fraction, "Held-out fraction per class");
  cmd->add_option("--rotation", c.rotation_deg, "Augmentation rotation in degrees");
  cmd->add_option("--brightness", c.brightness_factor, "Augmentation brightness factor");
}

void AddStyleFlags(CLI::App* cmd, RunConfig& c, std::string& tint_region) {
  cmd->add_option("--tint-alpha", c.alert.tint_alpha, "Red tint blend factor");
  cmd->add_option("--border-px", c.alert.border_px, "Red border width");
  cmd->add_option("--flash-period", c.alert.flash_period, "Tint every Nth frame of a run");
  cmd->add_option("--tint-region", tint_region, "Tint only x,y,w,h instead of the whole frame");
}

void PrintReport(const densd::EvalReport& r) {
  std::cout << densd::ReportToText(r);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  try {
    if (const auto path = FindConfigArg(argc, argv)) config = densd::LoadConfigFile(*path);
  } catch (const densd::Error& e) {
    std::cerr << "hajj-densd: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Crowd-density feature extraction, boosting and alerting"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path;
  bool version = false;
  app.add_option("--config", config_path, "TOML config with a [pipeline] table");
  app.add_option("--seed", config.seed, "Master seed");
  app.add_option("--jobs", config.jobs, "Worker threads");
  app.add_flag("--version", version, "Print artifact and model format versions");

  LbpModeOption lbp;
  std::string tint_region;

  // synth
  st::SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic corpus");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--per-class", synth.per_class, "Frames per density level");
  synth_cmd->add_option("--test-per-class", synth.test_per_class,
                        "Held-out frames per level, written to test_labels.csv");
  synth_cmd->add_option("--videos", synth.videos, "Videos per split");
  synth_cmd->add_option("--width", synth.spec.width, "Frame width");
  synth_cmd->add_option("--height", synth.spec.height, "Frame height");
  synth_cmd->add_option("--head-radius", synth.spec.head_radius, "Head disk radius");
  synth_cmd->add_option("--background", synth.spec.background, "Background intensity");
  synth_cmd->add_option("--head-intensity", synth.spec.head_intensity, "Head intensity");
  synth_cmd->add_option("--noise", synth.spec.noise_amplitude, "Noise amplitude");

  // extract
  fs::path ex_labels, ex_root, ex_frames, ex_out, ex_hist;
  std::string ex_region;
  auto* extract_cmd = app.add_subcommand("extract", "Extract features for labeled regions");
  auto* ex_labels_opt = extract_cmd->add_option("--labels", ex_labels, "Label CSV");
  extract_cmd->add_option("--frames-root", ex_root, "Root holding <video_id>/frame_* files");
  auto* ex_frames_opt =
      extract_cmd->add_option("--frames", ex_frames, "Unlabeled frame directory");
  extract_cmd->add_option("--region", ex_region, "x,y,w,h for --frames (default full frame)");
  extract_cmd->add_option("--out", ex_out, "Feature CSV")->required();
  extract_cmd->add_option("--histograms", ex_hist, "Also write feature histograms CSV");
  extract_cmd->add_option("--histogram-bins", config.histogram_bins, "Histogram bins");
  ex_labels_opt->excludes(ex_frames_opt);
  AddFeatureFlags(extract_cmd, config, lbp);

  // prepare
  fs::path pr_features, pr_test, pr_root, pr_out;
  auto* prepare_cmd = app.add_subcommand("prepare", "Relabel, split, augment and oversample");
  prepare_cmd->add_option("--features", pr_features, "Feature CSV")->required();
  prepare_cmd->add_option("--test-features", pr_test, "Held-out feature CSV (skips the split)");
  prepare_cmd->add_option("--frames-root", pr_root, "Frame root for augmentation")->required();
  prepare_cmd->add_option("--out", pr_out, "Prepared CSV")->required();
  AddPrepareFlags(prepare_cmd, config);
  AddFeatureFlags(prepare_cmd, config, lbp);

  // train
  fs::path tr_prepared, tr_out;
  auto* train_cmd = app.add_subcommand("train", "Fit the boosted classifier");
  train_cmd->add_option("--prepared", tr_prepared, "Prepared CSV")->required();
  train_cmd->add_option("--out", tr_out, "Model JSON")->required();
  AddGbmFlags(train_cmd, config);
  AddFeatureFlags(train_cmd, config, lbp);

  // grid
  fs::path gr_prepared, gr_out;
  auto* grid_cmd = app.add_subcommand("grid", "Cross-validated grid search");
  grid_cmd->add_option("--prepared", gr_prepared, "Prepared CSV")->required();
  grid_cmd->add_option("--out", gr_out, "CV table CSV")->required();
  AddGridFlags(grid_cmd, config);
  grid_cmd->add_option("--min-samples-split", config.gbm.min_samples_split,
                       "Smallest splittable node");
  grid_cmd->add_flag("--use-position", config.use_position, "Include x_center and y_center");

  // curve
  fs::path cu_prepared, cu_out;
  std::vector<std::size_t> checkpoints;
  auto* curve_cmd = app.add_subcommand("curve", "Cross-validated learning curve");
  curve_cmd->add_option("--prepared", cu_prepared, "Prepared CSV")->required();
  curve_cmd->add_option("--out", cu_out, "Curve CSV")->required();
  curve_cmd->add_option("--checkpoints", checkpoints, "Comma-separated round counts")
      ->delimiter(',');
  curve_cmd->add_option("--cv-folds", config.cv_folds, "Stratified folds");
  AddGbmFlags(curve_cmd, config);

  // evaluate
  fs::path ev_model, ev_prepared, ev_out, ev_text;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a model on the held-out rows");
  eval_cmd->add_option("--model", ev_model, "Model JSON")->required();
  eval_cmd->add_option("--prepared", ev_prepared, "Prepared CSV")->required();
  eval_cmd->add_option("--out", ev_out, "Report JSON")->required();
  eval_cmd->add_option("--text", ev_text, "Also write the text report");

  // predict
  fs::path pd_model, pd_frames, pd_out;
  std::string pd_region;
  auto* predict_cmd = app.add_subcommand("predict", "Classify a frame sequence");
  predict_cmd->add_option("--model", pd_model, "Model JSON")->required();
  predict_cmd->add_option("--frames", pd_frames, "Frame directory")->required();
  predict_cmd->add_option("--region", pd_region, "x,y,w,h (default full frame)");
  predict_cmd->add_option("--out", pd_out, "Predictions CSV")->required();
  predict_cmd->add_flag("--continue-on-error", config.continue_on_error,
                        "Record unreadable frames and keep going");

  // annotate
  fs::path an_preds, an_frames, an_out;
  auto* annotate_cmd = app.add_subcommand("annotate", "Render red-flash alert frames");
  annotate_cmd->add_option("--predictions", an_preds, "Predictions CSV")->required();
  annotate_cmd->add_option("--frames", an_frames, "Frame directory")->required();
  annotate_cmd->add_option("--out", an_out, "Output directory")->required();
  AddStyleFlags(annotate_cmd, config, tint_region);

  // pipeline
  fs::path pl_labels, pl_test, pl_root, pl_out;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every stage end to end");
  pipeline_cmd->add_option("--labels", pl_labels, "Label CSV")->required();
  pipeline_cmd->add_option("--test-labels", pl_test, "Held-out label CSV (skips the split)");
  pipeline_cmd->add_option("--frames-root", pl_root, "Frame root (default: label file dir)");
  pipeline_cmd->add_option("--out", pl_out, "Output directory")->required();
  pipeline_cmd->add_flag("--tune", config.tune, "Run the grid search before fitting");
  pipeline_cmd->add_option("--histogram-bins", config.histogram_bins, "Histogram bins");
  pipeline_cmd->add_flag("--continue-on-error", config.continue_on_error,
                         "Record unreadable frames and keep going");
  AddFeatureFlags(pipeline_cmd, config, lbp);
  AddPrepareFlags(pipeline_cmd, config);
  AddGbmFlags(pipeline_cmd, config);
  AddGridFlags(pipeline_cmd, config);
  AddStyleFlags(pipeline_cmd, config, tint_region);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (version) {
    std::cout << "hajj-densd " << densd::kVersion << " (model format "
              << densd::kModelFormatVersion << ")\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    lbp.Apply(config);
    if (!tint_region.empty()) config.alert.tint_region = ParseRegion(tint_region);
    config.Validate();
    densd::SetJobs(config.jobs);

    if (*synth_cmd) {
      synth.seed = config.seed;
      const auto s = st::Synth(synth);
      std::cout << "wrote " << s.frames << " frames, labels " << s.labels.string() << "\n";
    } else if (*extract_cmd) {
      if (!ex_frames.empty()) {
        std::optional<densd::Rect> region;
        if (!ex_region.empty()) region = ParseRegion(ex_region);
        const auto n =
            st::ExtractDirectory(ex_frames, region, config.feature_options(), ex_out);
        std::cout << "extracted " << n << " frames\n";
      } else {
        if (ex_labels.empty()) {
          densd::Fail(ErrorCode::kConfig, "extract needs --labels or --frames");
        }
        st::ExtractOptions o{ex_labels, ex_root.empty() ? ex_labels.parent_path() : ex_root,
                             ex_out, config.feature_options(), std::nullopt,
                             config.histogram_bins};
        if (!ex_hist.empty()) o.histograms = ex_hist;
        std::cout << "extracted " << st::Extract(o) << " rows\n";
      }
    } else if (*prepare_cmd) {
      st::PrepareOptions o{pr_features, std::nullopt, pr_root, pr_out, config.relabel_tau,
                           config.test_fraction,
                           {config.rotation_deg, config.brightness_factor,
                            config.feature_options()},
                           config.seed};
      if (!pr_test.empty()) o.test_features = pr_test;
      const auto s = st::Prepare(o);
      std::cout << "relabeled " << s.relabeled << ", train " << s.train_original << " -> "
                << s.train_rows << " rows, test " << s.test_rows << " rows\n";
    } else if (*train_cmd) {
      const auto model = st::Train(
          {tr_prepared, tr_out, config.gbm, config.use_position, config.feature_options()});
      for (std::size_t i = 0; i < model.num_features(); ++i) {
        std::cout << model.feature_names[i] << " importance " << model.importances[i] << "\n";
      }
    } else if (*grid_cmd) {
      const auto r = st::Grid({gr_prepared, gr_out, config.grid, config.cv_folds, config.gbm,
                               config.use_position, config.seed});
      const auto& b = r.best_result();
      std::cout << r.table.size() << " candidates, " << r.fits << " fits; best n_estimators="
                << b.params.n_estimators << " learning_rate=" << b.params.learning_rate
                << " max_depth=" << b.params.max_depth << " mean=" << b.mean << "\n";
    } else if (*curve_cmd) {
      const auto points = st::Curve({cu_prepared, cu_out, config.gbm, checkpoints,
                                     config.cv_folds, config.use_position, config.seed});
      std::cout << "wrote " << points.size() << " curve points\n";
    } else if (*eval_cmd) {
      st::EvaluateOptions o{ev_model, ev_prepared, ev_out, std::nullopt};
      if (!ev_text.empty()) o.out_text = ev_text;
      PrintReport(st::Evaluate(o));
    } else if (*predict_cmd) {
      std::optional<densd::Rect> region;
      if (!pd_region.empty()) region = ParseRegion(pd_region);
      const auto r =
          st::PredictFrames({pd_model, pd_frames, region, pd_out, config.continue_on_error});
      for (const auto& f : r.failures) {
        std::cerr << "skipped " << f.path.string() << ": " << f.message << "\n";
      }
      std::cout << "classified " << r.predictions.size() << " frames\n";
    } else if (*annotate_cmd) {
      const auto n = st::AnnotateFrames({an_preds, an_frames, an_out, config.alert});
      std::cout << "wrote " << n << " frames\n";
    } else if (*pipeline_cmd) {
      st::PipelineOptions o{pl_labels, std::nullopt, pl_root, pl_out, config};
      if (!pl_test.empty()) o.test_labels = pl_test;
      const auto s = st::Pipeline(o);
      PrintReport(s.report);
      std::cout << "artifacts in " << pl_out.string() << "\n";
    }
  } catch (const densd::Error& e) {
    std::cerr << "hajj-densd: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hajj-densd: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
