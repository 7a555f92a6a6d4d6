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

#include "densd/kernels.hpp"

namespace densd::kernels::serial {

std::vector<double> SobelMagnitude(const GrayFrame& frame, const Rect& window) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(window.w) * static_cast<std::size_t>(window.h));
  for (int y = window.y; y < window.y + window.h; ++y) {
    for (int x = window.x; x < window.x + window.w; ++x) {
      out.push_back(Magnitude(SobelAt(frame, x, y)));
    }
  }
  return out;
}

std::uint64_t CountEdges(const GrayFrame& frame, const Rect& window, double threshold) {
  std::uint64_t count = 0;
  for (int y = window.y; y < window.y + window.h; ++y) {
    for (int x = window.x; x < window.x + window.w; ++x) {
      if (Magnitude(SobelAt(frame, x, y)) >= threshold) ++count;
    }
  }
  return count;
}

std::vector<std::uint8_t> LbpCodes(const GrayFrame& frame, const Rect& window) {
  std::vector<std::uint8_t> out;
  for (int y = window.y + 1; y < window.y + window.h - 1; ++y) {
    for (int x = window.x + 1; x < window.x + window.w - 1; ++x) {
      out.push_back(LbpCodeAt(frame, x, y));
    }
  }
  return out;
}

LbpCounts LbpHistogram(const GrayFrame& frame, const Rect& window) {
  LbpCounts counts{};
  for (int y = window.y + 1; y < window.y + window.h - 1; ++y) {
    for (int x = window.x + 1; x < window.x + window.w - 1; ++x) {
      ++counts[LbpCodeAt(frame, x, y)];
    }
  }
  return counts;
}

std::uint64_t IntensitySum(const GrayFrame& frame, const Rect& window) {
  std::uint64_t sum = 0;
  for (int y = window.y; y < window.y + window.h; ++y) {
    for (int x = window.x; x < window.x + window.w; ++x) sum += frame.at(x, y);
  }
  return sum;
}

}  // namespace densd::kernels::serial
