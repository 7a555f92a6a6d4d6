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

namespace densd::kernels::omp {

namespace {

// Below this many pixels the fork/join cost outweighs the work.
constexpr long kParallelPixels = 16384;

long Pixels(const Rect& r) { return static_cast<long>(r.w) * r.h; }

}  // namespace

std::vector<double> SobelMagnitude(const GrayFrame& frame, const Rect& window) {
  std::vector<double> out(static_cast<std::size_t>(Pixels(window)));
#pragma omp parallel for schedule(static) if (Pixels(window) > kParallelPixels)
  for (int dy = 0; dy < window.h; ++dy) {
    double* row = out.data() + static_cast<std::size_t>(dy) * window.w;
    for (int dx = 0; dx < window.w; ++dx) {
      row[dx] = Magnitude(SobelAt(frame, window.x + dx, window.y + dy));
    }
  }
  return out;
}

std::uint64_t CountEdges(const GrayFrame& frame, const Rect& window, double threshold) {
  std::uint64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count) if (Pixels(window) > kParallelPixels)
  for (int y = window.y; y < window.y + window.h; ++y) {
    for (int x = window.x; x < window.x + window.w; ++x) {
      count += Magnitude(SobelAt(frame, x, y)) >= threshold ? 1 : 0;
    }
  }
  return count;
}

std::vector<std::uint8_t> LbpCodes(const GrayFrame& frame, const Rect& window) {
  const int iw = window.w - 2;
  const int ih = window.h - 2;
  if (iw <= 0 || ih <= 0) return {};
  std::vector<std::uint8_t> out(static_cast<std::size_t>(iw) * static_cast<std::size_t>(ih));
#pragma omp parallel for schedule(static) if (Pixels(window) > kParallelPixels)
  for (int dy = 0; dy < ih; ++dy) {
    for (int dx = 0; dx < iw; ++dx) {
      out[static_cast<std::size_t>(dy) * iw + dx] =
          LbpCodeAt(frame, window.x + 1 + dx, window.y + 1 + dy);
    }
  }
  return out;
}

LbpCounts LbpHistogram(const GrayFrame& frame, const Rect& window) {
  LbpCounts counts{};
#pragma omp parallel if (Pixels(window) > kParallelPixels)
  {
    LbpCounts local{};
#pragma omp for schedule(static) nowait
    for (int y = window.y + 1; y < window.y + window.h - 1; ++y) {
      for (int x = window.x + 1; x < window.x + window.w - 1; ++x) {
        ++local[LbpCodeAt(frame, x, y)];
      }
    }
#pragma omp critical(densd_lbp_merge)
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
  }
  return counts;
}

std::uint64_t IntensitySum(const GrayFrame& frame, const Rect& window) {
  std::uint64_t sum = 0;
#pragma omp parallel for schedule(static) reduction(+ : sum) if (Pixels(window) > kParallelPixels)
  for (int y = window.y; y < window.y + window.h; ++y) {
    for (int x = window.x; x < window.x + window.w; ++x) sum += frame.at(x, y);
  }
  return sum;
}

}  // namespace densd::kernels::omp
