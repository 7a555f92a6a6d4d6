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

#include "densd/image_io.hpp"

#include <gtest/gtest.h>

#include "densd/error.hpp"
#include "support/test_util.hpp"

namespace densd {
namespace {

using testing_util::TempDir;

GrayFrame Pattern(int w, int h) {
  GrayFrame f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f.at(x, y) = static_cast<std::uint8_t>((x * 37 + y * 11) % 256);
  }
  return f;
}

TEST(ImageIo, GrayRoundTripPngAndPgm) {
  TempDir dir;
  const GrayFrame f = Pattern(13, 7);
  for (const char* name : {"a.png", "a.pgm"}) {
    WriteImage(dir / name, f);
    const Image img = ReadImage(dir / name);
    ASSERT_TRUE(std::holds_alternative<GrayFrame>(img)) << name;
    EXPECT_EQ(std::get<GrayFrame>(img), f) << name;
  }
}

TEST(ImageIo, RgbRoundTripPngAndPpm) {
  TempDir dir;
  RgbFrame f(5, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      f.at(x, y) = {static_cast<std::uint8_t>(x * 50), static_cast<std::uint8_t>(y * 60), 7};
    }
  }
  for (const char* name : {"c.png", "c.ppm"}) {
    WriteImage(dir / name, f);
    const Image img = ReadImage(dir / name);
    ASSERT_TRUE(std::holds_alternative<RgbFrame>(img)) << name;
    EXPECT_EQ(std::get<RgbFrame>(img), f) << name;
  }
  EXPECT_EQ(ReadGray(dir / "c.png"), ToGray(f));
}

TEST(ImageIo, MissingAndCorruptFilesAreIoErrors) {
  TempDir dir;
  EXPECT_DENSD_ERROR(ReadImage(dir / "nope.png"), ErrorCode::kIo);
  testing_util::WriteFile(dir / "bad.png", "not a png");
  EXPECT_DENSD_ERROR(ReadImage(dir / "bad.png"), ErrorCode::kIo);
  testing_util::WriteFile(dir / "bad.pgm", "P5\n4 4\n255\nab");
  EXPECT_DENSD_ERROR(ReadImage(dir / "bad.pgm"), ErrorCode::kIo);
  EXPECT_DENSD_ERROR(WriteImage(dir / "x.bmp", GrayFrame(2, 2)), ErrorCode::kIo);
  EXPECT_DENSD_ERROR(WriteImage(dir / "missing" / "x.png", GrayFrame(2, 2)), ErrorCode::kIo);
}

TEST(ImageIo, FrameNamingAndListing) {
  TempDir dir;
  EXPECT_EQ(FrameFileName(17), "frame_000017.png");
  EXPECT_EQ(FrameFileName(3, ".pgm"), "frame_000003.pgm");
  WriteImage(dir / FrameFileName(10), GrayFrame(3, 3));
  WriteImage(dir / FrameFileName(2, ".pgm"), GrayFrame(3, 3));
  testing_util::WriteFile(dir / "notes.txt", "x");
  testing_util::WriteFile(dir / "frame_abc.png", "x");
  const auto frames = ListFrames(dir.path());
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].index, 2);
  EXPECT_EQ(frames[1].index, 10);
  EXPECT_EQ(FindFrame(dir.path(), 2).filename(), "frame_000002.pgm");
  EXPECT_EQ(FindFrame(dir.path(), 5).filename(), "frame_000005.png");
  EXPECT_DENSD_ERROR(ListFrames(dir / "absent"), ErrorCode::kIo);
}

}  // namespace
}  // namespace densd
