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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "densd/density.hpp"

namespace densd {

// Axis-aligned pixel rectangle. x, y is the top-left corner.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

Rect Intersect(const Rect& a, const Rect& b);
Rect BoundingBox(const Rect& a, const Rect& b);

// 8-bit single-channel raster, row-major.
class GrayFrame {
 public:
  GrayFrame() = default;
  GrayFrame(int width, int height, std::uint8_t fill = 0);
  GrayFrame(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  Rect bounds() const { return {0, 0, width_, height_}; }

  std::uint8_t at(int x, int y) const { return data_[Index(x, y)]; }
  std::uint8_t& at(int x, int y) { return data_[Index(x, y)]; }

  // Replicate (clamp-to-edge) access.
  std::uint8_t clamped(int x, int y) const;

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(data_).subspan(Index(0, y), width_);
  }

  friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

class RgbFrame {
 public:
  RgbFrame() = default;
  RgbFrame(int width, int height, Rgb fill = {});
  RgbFrame(int width, int height, std::vector<Rgb> data);

  int width() const { return width_; }
  int height() const { return height_; }

  const Rgb& at(int x, int y) const { return data_[Index(x, y)]; }
  Rgb& at(int x, int y) { return data_[Index(x, y)]; }

  std::span<const Rgb> data() const { return data_; }
  std::span<Rgb> data() { return data_; }

  friend bool operator==(const RgbFrame&, const RgbFrame&) = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> data_;
};

// ITU-601 luma, rounded half away from zero.
GrayFrame ToGray(const RgbFrame& frame);

// Replicates the single channel into r, g and b.
RgbFrame ToRgb(const GrayFrame& frame);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Pixel-centre convention: ((w - 1) / 2, (h - 1) / 2).
Point FrameCenter(const GrayFrame& frame);

// Rotates by angle_deg (counter-clockwise as displayed) about center using
// inverse mapping, bilinear interpolation and clamp-to-edge sampling.
GrayFrame Rotate(const GrayFrame& frame, double angle_deg, Point center);
GrayFrame Rotate(const GrayFrame& frame, double angle_deg);

// out = clamp(round(in * factor), 0, 255). factor must be positive.
GrayFrame AdjustBrightness(const GrayFrame& frame, double factor);

// Intersection of region with the frame; throws kInvalidRegion when empty.
GrayFrame Crop(const GrayFrame& frame, const Rect& region);

struct SynthSpec {
  int width = 320;
  int height = 240;
  Density density = Density::kModerate;
  int head_radius = 3;
  int background = 220;
  int head_intensity = 40;
  int noise_amplitude = 5;
  // Test hook: bypasses the per-level head-count band.
  std::optional<int> head_count;
};

// Inclusive head-count band for a level, scaled from the 320x240 reference
// canvas to the requested canvas area.
std::pair<int, int> HeadCountBand(Density density, int width, int height);

struct SynthFrame {
  GrayFrame frame;
  Density density;
  int head_count;
};

SynthFrame Synthesize(const SynthSpec& spec, std::uint64_t seed);

}  // namespace densd
