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

#include "densd/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "densd/error.hpp"
#include "densd/rng.hpp"

namespace densd {

std::optional<Density> ParseDensity(std::string_view text) {
  for (int k = 0; k < kNumClasses; ++k) {
    if (text == kDensityNames[k]) return static_cast<Density>(k);
  }
  if (text.size() == 1 && text[0] >= '0' && text[0] <= '2') {
    return static_cast<Density>(text[0] - '0');
  }
  return std::nullopt;
}

std::optional<Density> DensityFromIndex(int index) {
  if (index < 0 || index >= kNumClasses) return std::nullopt;
  return static_cast<Density>(index);
}

Rect Intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w);
  const int y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

Rect BoundingBox(const Rect& a, const Rect& b) {
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.x + a.w, b.x + b.w);
  const int y1 = std::max(a.y + a.h, b.y + b.h);
  return {x0, y0, x1 - x0, y1 - y0};
}

namespace {

void CheckDims(int width, int height, std::size_t size) {
  Require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument,
          "frame dimensions must be >= 1, got " + std::to_string(width) + "x" +
              std::to_string(height));
  Require(size == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
          ErrorCode::kInvalidArgument, "frame data length does not match width*height");
}

std::uint8_t ToByte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace

GrayFrame::GrayFrame(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  CheckDims(width, height, static_cast<std::size_t>(std::max(width, 0)) *
                               static_cast<std::size_t>(std::max(height, 0)));
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayFrame::GrayFrame(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  CheckDims(width, height, data_.size());
}

std::uint8_t GrayFrame::clamped(int x, int y) const {
  return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
}

RgbFrame::RgbFrame(int width, int height, Rgb fill) : width_(width), height_(height) {
  CheckDims(width, height, static_cast<std::size_t>(std::max(width, 0)) *
                               static_cast<std::size_t>(std::max(height, 0)));
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RgbFrame::RgbFrame(int width, int height, std::vector<Rgb> data)
    : width_(width), height_(height), data_(std::move(data)) {
  CheckDims(width, height, data_.size());
}

GrayFrame ToGray(const RgbFrame& frame) {
  std::vector<std::uint8_t> out(frame.data().size());
  std::transform(frame.data().begin(), frame.data().end(), out.begin(), [](const Rgb& p) {
    return ToByte(0.299 * p.r + 0.587 * p.g + 0.114 * p.b);
  });
  return GrayFrame(frame.width(), frame.height(), std::move(out));
}

RgbFrame ToRgb(const GrayFrame& frame) {
  std::vector<Rgb> out(frame.data().size());
  std::transform(frame.data().begin(), frame.data().end(), out.begin(),
                 [](std::uint8_t v) { return Rgb{v, v, v}; });
  return RgbFrame(frame.width(), frame.height(), std::move(out));
}

Point FrameCenter(const GrayFrame& frame) {
  return {(frame.width() - 1) / 2.0, (frame.height() - 1) / 2.0};
}

GrayFrame Rotate(const GrayFrame& frame, double angle_deg) {
  return Rotate(frame, angle_deg, FrameCenter(frame));
}

GrayFrame Rotate(const GrayFrame& frame, double angle_deg, Point center) {
  Require(std::isfinite(angle_deg), ErrorCode::kInvalidArgument, "rotation angle must be finite");
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const int w = frame.width();
  const int h = frame.height();
  GrayFrame out(w, h);

#pragma omp parallel for if (static_cast<long>(w) * h > 65536)
  for (int y = 0; y < h; ++y) {
    const double dy = y - center.y;
    for (int x = 0; x < w; ++x) {
      const double dx = x - center.x;
      const double sx = std::clamp(center.x + c * dx - s * dy, 0.0, static_cast<double>(w - 1));
      const double sy = std::clamp(center.y + s * dx + c * dy, 0.0, static_cast<double>(h - 1));
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      const double top = (1.0 - fx) * frame.at(x0, y0) + fx * frame.at(x1, y0);
      const double bottom = (1.0 - fx) * frame.at(x0, y1) + fx * frame.at(x1, y1);
      out.at(x, y) = ToByte((1.0 - fy) * top + fy * bottom);
    }
  }
  return out;
}

GrayFrame AdjustBrightness(const GrayFrame& frame, double factor) {
  Require(std::isfinite(factor) && factor > 0.0, ErrorCode::kInvalidArgument,
          "brightness factor must be positive, got " + std::to_string(factor));
  std::vector<std::uint8_t> out(frame.data().size());
  std::transform(frame.data().begin(), frame.data().end(), out.begin(),
                 [factor](std::uint8_t v) { return ToByte(v * factor); });
  return GrayFrame(frame.width(), frame.height(), std::move(out));
}

GrayFrame Crop(const GrayFrame& frame, const Rect& region) {
  const Rect r = Intersect(region, frame.bounds());
  Require(!r.empty(), ErrorCode::kInvalidRegion, "crop region does not intersect the frame");
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(r.w) * static_cast<std::size_t>(r.h));
  for (int y = r.y; y < r.y + r.h; ++y) {
    const auto row = frame.row(y).subspan(static_cast<std::size_t>(r.x), static_cast<std::size_t>(r.w));
    out.insert(out.end(), row.begin(), row.end());
  }
  return GrayFrame(r.w, r.h, std::move(out));
}

std::pair<int, int> HeadCountBand(Density density, int width, int height) {
  static constexpr std::array<std::pair<int, int>, kNumClasses> kReference = {
      std::pair{20, 60}, std::pair{100, 200}, std::pair{300, 600}};
  const double scale = static_cast<double>(width) * height / (320.0 * 240.0);
  const auto [lo, hi] = kReference[ToIndex(density)];
  const int scaled_lo = static_cast<int>(std::lround(lo * scale));
  const int scaled_hi = static_cast<int>(std::lround(hi * scale));
  return {scaled_lo, std::max(scaled_lo, scaled_hi)};
}

SynthFrame Synthesize(const SynthSpec& spec, std::uint64_t seed) {
  Require(spec.width >= 1 && spec.height >= 1, ErrorCode::kInvalidArgument,
          "synth canvas must be at least 1x1");
  Require(spec.head_radius >= 1, ErrorCode::kInvalidArgument, "head_radius must be >= 1");
  Require(spec.noise_amplitude >= 0, ErrorCode::kInvalidArgument, "noise_amplitude must be >= 0");
  Require(spec.background >= 0 && spec.background <= 255 && spec.head_intensity >= 0 &&
              spec.head_intensity <= 255,
          ErrorCode::kInvalidArgument, "synth intensities must lie in [0,255]");
  Require(!spec.head_count || *spec.head_count >= 0, ErrorCode::kInvalidArgument,
          "head_count override must be >= 0");

  Rng rng(seed);
  GrayFrame frame(spec.width, spec.height);
  for (auto& px : frame.data()) {
    const int noise = spec.noise_amplitude > 0
                          ? static_cast<int>(rng.Between(-spec.noise_amplitude, spec.noise_amplitude))
                          : 0;
    px = static_cast<std::uint8_t>(std::clamp(spec.background + noise, 0, 255));
  }

  int heads = 0;
  if (spec.head_count) {
    heads = *spec.head_count;
  } else {
    const auto [lo, hi] = HeadCountBand(spec.density, spec.width, spec.height);
    heads = static_cast<int>(rng.Between(lo, hi));
  }

  const int r = spec.head_radius;
  const auto ink = static_cast<std::uint8_t>(spec.head_intensity);
  for (int i = 0; i < heads; ++i) {
    const int cx = static_cast<int>(rng.Below(static_cast<std::uint64_t>(spec.width)));
    const int cy = static_cast<int>(rng.Below(static_cast<std::uint64_t>(spec.height)));
    for (int y = std::max(0, cy - r); y <= std::min(spec.height - 1, cy + r); ++y) {
      for (int x = std::max(0, cx - r); x <= std::min(spec.width - 1, cx + r); ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) frame.at(x, y) = ink;
      }
    }
  }
  return {std::move(frame), spec.density, heads};
}

}  // namespace densd
