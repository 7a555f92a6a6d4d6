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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "densd/boosting.hpp"
#include "densd/features.hpp"
#include "densd/imaging.hpp"

namespace densd {

struct FramePrediction {
  int frame = 0;
  Density label = Density::kModerate;
  std::array<double, kNumClasses> probabilities{};
  FeatureVector features;
};

struct AlertStyle {
  double tint_alpha = 0.35;
  int border_px = 4;
  int flash_period = 2;
  // Tint only this rectangle instead of the whole frame.
  std::optional<Rect> tint_region;

  void Validate() const;
};

struct FrameFailure {
  int frame = 0;
  std::filesystem::path path;
  std::string message;
};

struct SequenceResult {
  std::vector<FramePrediction> predictions;
  std::vector<FrameFailure> failures;
};

// Classifies every frame_%06d image in frames_dir in ascending index order.
// Without a region the whole frame is used. With continue_on_error, frames
// that fail are recorded in failures and skipped; otherwise the first failure
// (by index) is thrown with the file named.
SequenceResult ClassifySequence(const GbmModel& model, const std::filesystem::path& frames_dir,
                                std::optional<Region> region = std::nullopt,
                                bool continue_on_error = false);

inline constexpr std::string_view kPredictionsHeader =
    "frame,label,p_moderate,p_overcrowded,p_very_dense,area,x_center,y_center,edge_density,"
    "avg_intensity,lbp_texture";

void WritePredictionsCsv(const std::filesystem::path& path,
                         std::span<const FramePrediction> predictions);
std::vector<FramePrediction> ReadPredictionsCsv(const std::filesystem::path& path);

// Position of each prediction inside its run of consecutive very-dense frames
// (consecutive frame indices), or -1 for other labels.
std::vector<int> FlashPhases(std::span<const FramePrediction> predictions);

// Non-very-dense labels pass through (gray replicated to RGB). Very-dense
// frames always get a solid red border; the red tint
// r' = round((1-a)r + 255a), g' = round((1-a)g), b' = round((1-a)b) is added
// when phase % flash_period == 0.
RgbFrame Annotate(const RgbFrame& frame, Density label, const AlertStyle& style, int phase);
RgbFrame Annotate(const GrayFrame& frame, Density label, const AlertStyle& style, int phase);

// Writes one annotated image per prediction into out_dir under the input's
// file name (PGM input becomes PPM), plus alerts.log with
// frame_index,label,probability_of_label for very-dense frames. Returns the
// number of frames written.
std::size_t EmitAnnotatedSequence(std::span<const FramePrediction> predictions,
                                  const std::filesystem::path& frames_dir,
                                  const std::filesystem::path& out_dir, const AlertStyle& style);

}  // namespace densd
