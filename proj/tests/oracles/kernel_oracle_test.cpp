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

#include <gtest/gtest.h>

#include "densd/features.hpp"
#include "densd/kernels.hpp"
#include "densd/rng.hpp"
#include "support/oracles.hpp"

namespace densd {
namespace {

GrayFrame RandomFrame(Rng& rng, int w, int h, int levels) {
  GrayFrame f(w, h);
  for (auto& px : f.data()) px = static_cast<std::uint8_t>(rng.Below(levels) * (255 / (levels - 1)));
  return f;
}

Rect RandomWindow(Rng& rng, const GrayFrame& f) {
  const int w = static_cast<int>(rng.Between(3, f.width()));
  const int h = static_cast<int>(rng.Between(3, f.height()));
  return {static_cast<int>(rng.Between(0, f.width() - w)),
          static_cast<int>(rng.Between(0, f.height() - h)), w, h};
}

class KernelOracle : public ::testing::TestWithParam<int> {};

TEST_P(KernelOracle, SobelMatchesBruteForce) {
  Rng rng(100 + GetParam());
  const GrayFrame f = RandomFrame(rng, 16, 16, GetParam() % 2 ? 256 : 3);
  const auto expected = oracle::SobelMagnitude(f);
  EXPECT_EQ(SobelMagnitude(f), expected);
  EXPECT_EQ(kernels::serial::SobelMagnitude(f, f.bounds()), expected);
  EXPECT_EQ(kernels::omp::SobelMagnitude(f, f.bounds()), expected);

  const Rect win = RandomWindow(rng, f);
  const auto got = kernels::omp::SobelMagnitude(f, win);
  ASSERT_EQ(got.size(), static_cast<std::size_t>(win.w * win.h));
  std::uint64_t edges = 0;
  for (int y = 0; y < win.h; ++y) {
    for (int x = 0; x < win.w; ++x) {
      const double m = expected[(win.y + y) * 16 + win.x + x];
      EXPECT_EQ(got[y * win.w + x], m);
      edges += m >= 128.0;
    }
  }
  EXPECT_EQ(kernels::serial::CountEdges(f, win, 128.0), edges);
  EXPECT_EQ(kernels::omp::CountEdges(f, win, 128.0), edges);
}

TEST_P(KernelOracle, LbpCodesMatchBruteForce) {
  Rng rng(200 + GetParam());
  const GrayFrame f = RandomFrame(rng, 16, 16, GetParam() % 2 ? 256 : 4);
  for (int y = 1; y < 15; ++y) {
    for (int x = 1; x < 15; ++x) EXPECT_EQ(LbpCode(f, x, y), oracle::LbpCode(f, x, y));
  }
  const Rect win = RandomWindow(rng, f);
  const auto codes = kernels::omp::LbpCodes(f, win);
  EXPECT_EQ(codes, kernels::serial::LbpCodes(f, win));
  std::size_t i = 0;
  for (int y = win.y + 1; y < win.y + win.h - 1; ++y) {
    for (int x = win.x + 1; x < win.x + win.w - 1; ++x) {
      EXPECT_EQ(codes[i++], oracle::LbpCode(f, x, y));
    }
  }
  EXPECT_EQ(i, codes.size());
}

TEST_P(KernelOracle, LbpHistogramMatchesBruteForce) {
  Rng rng(300 + GetParam());
  const GrayFrame f = RandomFrame(rng, 16, 16, GetParam() % 2 ? 256 : 2);
  EXPECT_EQ(ComputeLbpHistogram(f, f.bounds()).bins, oracle::LbpHistogram(f, f.bounds()));
  const Rect win = RandomWindow(rng, f);
  EXPECT_EQ(ComputeLbpHistogram(f, win).bins, oracle::LbpHistogram(f, win));
  EXPECT_EQ(kernels::serial::LbpHistogram(f, win), kernels::omp::LbpHistogram(f, win));
}

INSTANTIATE_TEST_SUITE_P(RandomFrames, KernelOracle, ::testing::Range(0, 50));

TEST(KernelOracle, LargeFramesTakeTheParallelPath) {
  Rng rng(9);
  const GrayFrame f = RandomFrame(rng, 300, 200, 256);
  EXPECT_EQ(kernels::omp::SobelMagnitude(f, f.bounds()), oracle::SobelMagnitude(f));
  EXPECT_EQ(kernels::omp::LbpHistogram(f, f.bounds()),
            kernels::serial::LbpHistogram(f, f.bounds()));
  EXPECT_EQ(kernels::omp::IntensitySum(f, f.bounds()),
            kernels::serial::IntensitySum(f, f.bounds()));
  EXPECT_EQ(kernels::omp::CountEdges(f, f.bounds(), 200.0),
            kernels::serial::CountEdges(f, f.bounds(), 200.0));
}

}  // namespace
}  // namespace densd
