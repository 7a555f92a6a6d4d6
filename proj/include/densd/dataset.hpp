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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "densd/density.hpp"
#include "densd/features.hpp"
#include "densd/matrix.hpp"

namespace densd {

struct LabeledRegion {
  std::string video_id;
  int frame = 0;
  Region region;
  Density label = Density::kModerate;

  friend bool operator==(const LabeledRegion&, const LabeledRegion&) = default;
};

enum class Origin { kOriginal, kRotated, kBrightened };

std::string_view OriginName(Origin origin);

struct DatasetRow {
  std::string video_id;
  int frame = 0;
  Region region;
  FeatureVector features;
  Density label = Density::kModerate;
  Origin origin = Origin::kOriginal;

  friend bool operator==(const DatasetRow&, const DatasetRow&) = default;
};

using ClassCounts = std::array<std::size_t, kNumClasses>;

template <typename Row>
ClassCounts CountClasses(std::span<const Row> rows) {
  ClassCounts counts{};
  for (const auto& r : rows) ++counts[ToIndex(r.label)];
  return counts;
}

// Label CSV: header video_id,frame,x,y,w,h,label.
inline constexpr std::string_view kLabelHeader = "video_id,frame,x,y,w,h,label";

std::vector<LabeledRegion> ParseLabels(const std::filesystem::path& path);
void WriteLabels(const std::filesystem::path& path, std::span<const LabeledRegion> rows);

// One entry per (video_id, frame), in first-appearance order. The label is
// the majority vote with ties going to the more severe class; the region is
// the bounding box of all the frame's regions.
std::vector<LabeledRegion> DedupPerFrame(std::span<const LabeledRegion> rows);

// Rows with edge_density strictly above tau become very_dense. Returns the
// number of rows whose label changed.
std::size_t ThresholdRelabel(std::span<DatasetRow> rows, double tau = 64.5);

// Loads the grayscale frame for (video_id, frame index).
using FrameSource = std::function<GrayFrame(const std::string& video_id, int frame)>;

// Frames at root/<video_id>/frame_%06d.{png,pgm,ppm}.
FrameSource DirectoryFrameSource(const std::filesystem::path& root);

// Feature extraction for each labeled region, parallel across rows.
std::vector<DatasetRow> ExtractRows(std::span<const LabeledRegion> regions,
                                    const FrameSource& frames, const FeatureOptions& options);

struct AugmentOptions {
  double rotation_deg = 10.0;
  double brightness_factor = 1.2;
  FeatureOptions features;
};

// Emits original, rotated and brightened rows for each input row, in that
// order, with features re-extracted from the transformed frame.
std::vector<DatasetRow> Augment(std::span<const DatasetRow> rows, const FrameSource& frames,
                                const AugmentOptions& options);

// Duplicates minority-class rows (seeded sampling with replacement) until every
// class matches the majority count. The input rows come first, unchanged.
std::vector<DatasetRow> Oversample(std::span<const DatasetRow> rows, std::uint64_t seed);

struct ScalerParams {
  std::vector<double> means;
  std::vector<double> stds;

  static constexpr double kConstantStd = 1e-12;
  bool IsConstant(std::size_t i) const { return stds[i] < kConstantStd; }
  std::size_t size() const { return means.size(); }

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

// Per-column mean and population standard deviation. Needs >= 2 rows.
ScalerParams ScalerFit(const FeatureMatrix& x);
std::vector<double> ScalerApply(const ScalerParams& params, std::span<const double> x);
FeatureMatrix ScalerApply(const ScalerParams& params, const FeatureMatrix& x);

FeatureMatrix BuildMatrix(std::span<const DatasetRow> rows, std::span<const FeatureId> features);
std::vector<double> SelectFeatures(const FeatureVector& v, std::span<const FeatureId> features);
std::vector<int> LabelIndices(std::span<const DatasetRow> rows);

struct SplitResult {
  std::vector<DatasetRow> train;
  std::vector<DatasetRow> test;
};

// Stratified split: per class, round(count * test_fraction) rows drawn into
// the test side. Both sides keep input order.
SplitResult Split(std::span<const DatasetRow> rows, double test_fraction, std::uint64_t seed);

// Feature CSV written by extraction.
inline constexpr std::string_view kFeatureHeader =
    "video_id,frame,x,y,w,h,area,x_center,y_center,edge_density,avg_intensity,lbp_texture,label";

void WriteFeatureCsv(const std::filesystem::path& path, std::span<const DatasetRow> rows,
                     bool include_labels = true);
// Every row must carry a label.
std::vector<DatasetRow> ReadFeatureCsv(const std::filesystem::path& path);

// Feature columns plus origin and split.
inline constexpr std::string_view kPreparedHeader =
    "video_id,frame,x,y,w,h,area,x_center,y_center,edge_density,avg_intensity,lbp_texture,label,"
    "origin,split";

void WritePreparedCsv(const std::filesystem::path& path, const SplitResult& data);
SplitResult ReadPreparedCsv(const std::filesystem::path& path);

}  // namespace densd
