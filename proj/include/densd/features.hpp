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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "densd/imaging.hpp"

namespace densd {

using Region = Rect;

struct FeatureVector {
  double area = 0.0;           // pixels^2
  double x_center = 0.0;       // pixels
  double y_center = 0.0;       // pixels
  double edge_density = 0.0;   // percent, [0, 100]
  double avg_intensity = 0.0;  // [0, 255]
  double lbp_texture = 0.0;    // [0, 1]

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class FeatureId { kArea, kXCenter, kYCenter, kEdgeDensity, kAvgIntensity, kLbpTexture };

inline constexpr std::array<FeatureId, 6> kAllFeatures = {
    FeatureId::kArea,         FeatureId::kXCenter,      FeatureId::kYCenter,
    FeatureId::kEdgeDensity,  FeatureId::kAvgIntensity, FeatureId::kLbpTexture};

std::string_view FeatureName(FeatureId id);
std::optional<FeatureId> ParseFeatureName(std::string_view name);
double FeatureValue(const FeatureVector& v, FeatureId id);

// Classifier inputs: area, edge_density, avg_intensity, lbp_texture, plus
// x_center, y_center when use_position is set.
std::vector<FeatureId> DefaultFeatureSet(bool use_position);

// paper: mean of the 256 normalized bins (always 1/256).
// mean-code: mean raw code / 255.
enum class LbpMode { kPaper, kMeanCode };

std::string_view LbpModeName(LbpMode mode);
std::optional<LbpMode> ParseLbpMode(std::string_view text);

struct LbpHistogram {
  std::array<double, 256> bins{};
};

struct FeatureOptions {
  double edge_threshold = 128.0;
  LbpMode lbp_mode = LbpMode::kPaper;
};

// Clips region to the frame; throws kInvalidRegion unless at least 3x3 remains.
Region ClipRegion(const GrayFrame& frame, const Region& region);

// Unnormalized 3x3 Sobel magnitude for every pixel, replicate borders.
// Throws kInvalidArgument for frames smaller than 3x3.
std::vector<double> SobelMagnitude(const GrayFrame& frame);

// Percentage of region pixels whose Sobel magnitude is >= edge_threshold.
// Neighbors outside the region but inside the frame are used as-is.
double EdgeDensity(const GrayFrame& frame, const Region& region, double edge_threshold = 128.0);

// Throws kOutOfNeighborhood unless (x, y) has all 8 neighbors in the frame.
std::uint8_t LbpCode(const GrayFrame& frame, int x, int y);

// Normalized histogram of codes over the region interior (1-pixel rim excluded).
LbpHistogram ComputeLbpHistogram(const GrayFrame& frame, const Region& region);

double LbpTexture(const LbpHistogram& hist, LbpMode mode = LbpMode::kPaper);

double AvgIntensity(const GrayFrame& frame, const Region& region);

FeatureVector ExtractFeatures(const GrayFrame& frame, const Region& region,
                              const FeatureOptions& options = {});

}  // namespace densd
