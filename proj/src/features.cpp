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

#include "densd/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "densd/error.hpp"
#include "densd/kernels.hpp"

namespace densd {

namespace {

constexpr std::array<std::string_view, 6> kFeatureNames = {
    "area", "x_center", "y_center", "edge_density", "avg_intensity", "lbp_texture"};

std::string Describe(const Region& r) {
  return "(" + std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.w) + "," +
         std::to_string(r.h) + ")";
}

}  // namespace

std::string_view FeatureName(FeatureId id) { return kFeatureNames[static_cast<int>(id)]; }

std::optional<FeatureId> ParseFeatureName(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == name) return static_cast<FeatureId>(i);
  }
  return std::nullopt;
}

double FeatureValue(const FeatureVector& v, FeatureId id) {
  switch (id) {
    case FeatureId::kArea: return v.area;
    case FeatureId::kXCenter: return v.x_center;
    case FeatureId::kYCenter: return v.y_center;
    case FeatureId::kEdgeDensity: return v.edge_density;
    case FeatureId::kAvgIntensity: return v.avg_intensity;
    case FeatureId::kLbpTexture: return v.lbp_texture;
  }
  return 0.0;
}

std::vector<FeatureId> DefaultFeatureSet(bool use_position) {
  std::vector<FeatureId> ids = {FeatureId::kArea, FeatureId::kEdgeDensity,
                                FeatureId::kAvgIntensity, FeatureId::kLbpTexture};
  if (use_position) {
    ids.push_back(FeatureId::kXCenter);
    ids.push_back(FeatureId::kYCenter);
  }
  return ids;
}

std::string_view LbpModeName(LbpMode mode) {
  return mode == LbpMode::kPaper ? "paper" : "mean-code";
}

std::optional<LbpMode> ParseLbpMode(std::string_view text) {
  if (text == "paper") return LbpMode::kPaper;
  if (text == "mean-code") return LbpMode::kMeanCode;
  return std::nullopt;
}

Region ClipRegion(const GrayFrame& frame, const Region& region) {
  const Region clipped = Intersect(region, frame.bounds());
  Require(clipped.w >= 3 && clipped.h >= 3, ErrorCode::kInvalidRegion,
          "region " + Describe(region) + " leaves less than 3x3 pixels inside a " +
              std::to_string(frame.width()) + "x" + std::to_string(frame.height()) + " frame");
  return clipped;
}

std::vector<double> SobelMagnitude(const GrayFrame& frame) {
  Require(frame.width() >= 3 && frame.height() >= 3, ErrorCode::kInvalidArgument,
          "Sobel needs a frame of at least 3x3");
  return kernels::omp::SobelMagnitude(frame, frame.bounds());
}

double EdgeDensity(const GrayFrame& frame, const Region& region, double edge_threshold) {
  Require(!std::isnan(edge_threshold), ErrorCode::kInvalidArgument, "edge threshold is NaN");
  const Region r = ClipRegion(frame, region);
  const auto edges = kernels::omp::CountEdges(frame, r, edge_threshold);
  return 100.0 * static_cast<double>(edges) / (static_cast<double>(r.w) * r.h);
}

std::uint8_t LbpCode(const GrayFrame& frame, int x, int y) {
  Require(x >= 1 && y >= 1 && x <= frame.width() - 2 && y <= frame.height() - 2,
          ErrorCode::kOutOfNeighborhood,
          "pixel (" + std::to_string(x) + "," + std::to_string(y) +
              ") lacks a full 3x3 neighborhood");
  return kernels::LbpCodeAt(frame, x, y);
}

LbpHistogram ComputeLbpHistogram(const GrayFrame& frame, const Region& region) {
  const Region r = ClipRegion(frame, region);
  const auto counts = kernels::omp::LbpHistogram(frame, r);
  const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  Require(total > 0, ErrorCode::kInvalidRegion, "region interior is empty");
  LbpHistogram hist;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    hist.bins[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return hist;
}

double LbpTexture(const LbpHistogram& hist, LbpMode mode) {
  if (mode == LbpMode::kPaper) {
    return std::accumulate(hist.bins.begin(), hist.bins.end(), 0.0) / 256.0;
  }
  double mean_code = 0.0;
  for (std::size_t code = 0; code < hist.bins.size(); ++code) {
    mean_code += static_cast<double>(code) * hist.bins[code];
  }
  return std::clamp(mean_code / 255.0, 0.0, 1.0);
}

double AvgIntensity(const GrayFrame& frame, const Region& region) {
  const Region r = ClipRegion(frame, region);
  return static_cast<double>(kernels::omp::IntensitySum(frame, r)) /
         (static_cast<double>(r.w) * r.h);
}

FeatureVector ExtractFeatures(const GrayFrame& frame, const Region& region,
                              const FeatureOptions& options) {
  const Region r = ClipRegion(frame, region);
  FeatureVector v;
  v.area = static_cast<double>(r.w) * r.h;
  v.x_center = r.x + r.w / 2.0;
  v.y_center = r.y + r.h / 2.0;
  v.edge_density = EdgeDensity(frame, r, options.edge_threshold);
  v.avg_intensity = AvgIntensity(frame, r);
  v.lbp_texture = LbpTexture(ComputeLbpHistogram(frame, r), options.lbp_mode);
  return v;
}

}  // namespace densd
