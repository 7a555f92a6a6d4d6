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
#include <optional>
#include <string>
#include <vector>

#include "densd/alert.hpp"
#include "densd/config.hpp"
#include "densd/dataset.hpp"
#include "densd/eval.hpp"
#include "densd/imaging.hpp"
#include "densd/tuning.hpp"

// File-in, file-out wrappers around the library operations. The CLI
// subcommands and the pipeline are thin layers over these.
namespace densd::stages {

namespace fs = std::filesystem;

// --- synth ---

struct SynthOptions {
  fs::path out_dir;
  int per_class = 10;
  // When > 0 a disjoint held-out corpus is written next to the training one
  // with its own label file.
  int test_per_class = 0;
  int videos = 3;
  SynthSpec spec;  // density and head_count are ignored
  std::uint64_t seed = 0;
};

struct SynthSummary {
  std::size_t frames = 0;
  fs::path labels;
  std::optional<fs::path> test_labels;
};

SynthSummary Synth(const SynthOptions& options);

// --- extract ---

struct ExtractOptions {
  fs::path labels;
  fs::path frames_root;
  fs::path out;
  FeatureOptions features;
  std::optional<fs::path> histograms;
  int histogram_bins = 20;
};

// Parse, dedup, extract. Returns the number of rows written.
std::size_t Extract(const ExtractOptions& options);

// Unlabeled extraction over every frame of one directory.
std::size_t ExtractDirectory(const fs::path& frames_dir, std::optional<Region> region,
                             const FeatureOptions& features, const fs::path& out);

// --- prepare ---

struct PrepareOptions {
  fs::path features;
  // Pre-split held-out rows; when set the stratified split is skipped.
  std::optional<fs::path> test_features;
  fs::path frames_root;
  fs::path out;
  double relabel_tau = 64.5;
  double test_fraction = 0.2;
  AugmentOptions augment;
  std::uint64_t seed = 0;
};

struct PrepareSummary {
  std::size_t relabeled = 0;
  std::size_t train_original = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

PrepareSummary Prepare(const PrepareOptions& options);

// --- train / tune ---

struct TrainOptions {
  fs::path prepared;
  fs::path out;
  GbmParams params;
  bool use_position = false;
  FeatureOptions features;  // recorded in the model for later extraction
};

GbmModel Train(const TrainOptions& options);

struct GridOptions {
  fs::path prepared;
  fs::path out;
  ParamGrid grid = ParamGrid::Reference();
  int folds = 5;
  GbmParams base;
  bool use_position = false;
  std::uint64_t seed = 0;
};

CvResult Grid(const GridOptions& options);

struct CurveOptions {
  fs::path prepared;
  fs::path out;
  GbmParams params;
  std::vector<std::size_t> checkpoints;
  int folds = 5;
  bool use_position = false;
  std::uint64_t seed = 0;
};

std::vector<CurvePoint> Curve(const CurveOptions& options);

// --- evaluate / predict / annotate ---

struct EvaluateOptions {
  fs::path model;
  fs::path prepared;
  fs::path out_json;
  std::optional<fs::path> out_text;
};

EvalReport Evaluate(const EvaluateOptions& options);

struct PredictOptions {
  fs::path model;
  fs::path frames_dir;
  std::optional<Region> region;
  fs::path out;
  bool continue_on_error = false;
};

SequenceResult PredictFrames(const PredictOptions& options);

struct AnnotateOptions {
  fs::path predictions;
  fs::path frames_dir;
  fs::path out_dir;
  AlertStyle style;
};

std::size_t AnnotateFrames(const AnnotateOptions& options);

// --- pipeline ---

struct PipelineOptions {
  fs::path labels;
  std::optional<fs::path> test_labels;
  fs::path frames_root;  // defaults to the label file's directory
  fs::path out_dir;
  RunConfig config;
};

struct PipelineSummary {
  EvalReport report;
  std::optional<CvResult> cv;
  std::vector<fs::path> artifacts;
};

PipelineSummary Pipeline(const PipelineOptions& options);

// Sub-seed for a named stage.
std::uint64_t StageSeed(std::uint64_t master, std::string_view stage);

}  // namespace densd::stages
