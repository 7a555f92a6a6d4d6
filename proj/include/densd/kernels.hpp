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
#include <cmath>
#include <cstdint>
#include <vector>

#include "densd/imaging.hpp"

// Per-pixel feature kernels. Each kernel has a serial reference in
// kernels::serial and a row-parallel OpenMP version in kernels::omp; the two
// must agree exactly and the test suite holds them to it. Windows passed in
// here are assumed already clipped to the frame; the features module
// validates regions before calling down.
namespace densd::kernels {

struct Gradient {
  int gx = 0;
  int gy = 0;
};

// 3x3 Sobel at (x, y) with replicate padding at the frame border.
inline Gradient SobelAt(const GrayFrame& f, int x, int y) {
  const int tl = f.clamped(x - 1, y - 1), t = f.clamped(x, y - 1), tr = f.clamped(x + 1, y - 1);
  const int l = f.clamped(x - 1, y), r = f.clamped(x + 1, y);
  const int bl = f.clamped(x - 1, y + 1), b = f.clamped(x, y + 1), br = f.clamped(x + 1, y + 1);
  return {(tr + 2 * r + br) - (tl + 2 * l + bl), (bl + 2 * b + br) - (tl + 2 * t + tr)};
}

inline double Magnitude(Gradient g) {
  return std::sqrt(static_cast<double>(g.gx * g.gx + g.gy * g.gy));
}

// Bits 7..0 = TL, T, TR, R, BR, B, BL, L; a bit is set when neighbor >= center.
// (x, y) must have all eight neighbors in bounds.
inline std::uint8_t LbpCodeAt(const GrayFrame& f, int x, int y) {
  const std::uint8_t c = f.at(x, y);
  unsigned code = 0;
  code |= static_cast<unsigned>(f.at(x - 1, y - 1) >= c) << 7;
  code |= static_cast<unsigned>(f.at(x, y - 1) >= c) << 6;
  code |= static_cast<unsigned>(f.at(x + 1, y - 1) >= c) << 5;
  code |= static_cast<unsigned>(f.at(x + 1, y) >= c) << 4;
  code |= static_cast<unsigned>(f.at(x + 1, y + 1) >= c) << 3;
  code |= static_cast<unsigned>(f.at(x, y + 1) >= c) << 2;
  code |= static_cast<unsigned>(f.at(x - 1, y + 1) >= c) << 1;
  code |= static_cast<unsigned>(f.at(x - 1, y) >= c);
  return static_cast<std::uint8_t>(code);
}

using LbpCounts = std::array<std::uint64_t, 256>;

namespace serial {

// Row-major magnitudes for every pixel of window.
std::vector<double> SobelMagnitude(const GrayFrame& frame, const Rect& window);
std::uint64_t CountEdges(const GrayFrame& frame, const Rect& window, double threshold);
// Codes for the window interior (its 1-pixel rim excluded), row-major.
std::vector<std::uint8_t> LbpCodes(const GrayFrame& frame, const Rect& window);
LbpCounts LbpHistogram(const GrayFrame& frame, const Rect& window);
std::uint64_t IntensitySum(const GrayFrame& frame, const Rect& window);

}  // namespace serial

namespace omp {

std::vector<double> SobelMagnitude(const GrayFrame& frame, const Rect& window);
std::uint64_t CountEdges(const GrayFrame& frame, const Rect& window, double threshold);
std::vector<std::uint8_t> LbpCodes(const GrayFrame& frame, const Rect& window);
LbpCounts LbpHistogram(const GrayFrame& frame, const Rect& window);
std::uint64_t IntensitySum(const GrayFrame& frame, const Rect& window);

}  // namespace omp

}  // namespace densd::kernels
