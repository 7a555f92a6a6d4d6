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

#include <filesystem>
#include <variant>
#include <vector>

#include "densd/imaging.hpp"

namespace densd {

using Image = std::variant<GrayFrame, RgbFrame>;

// PNG (8-bit gray or RGB; other PNG layouts are converted), or binary PGM/PPM.
Image ReadImage(const std::filesystem::path& path);

// Reads any supported image and converts it to grayscale.
GrayFrame ReadGray(const std::filesystem::path& path);

// Output format follows the extension: .png, .pgm (gray only) or .ppm.
void WriteImage(const std::filesystem::path& path, const GrayFrame& frame);
void WriteImage(const std::filesystem::path& path, const RgbFrame& frame);

struct FrameFile {
  int index = 0;
  std::filesystem::path path;
};

// frame_%06d with the given extension.
std::filesystem::path FrameFileName(int index, std::string_view extension = ".png");

// Files named frame_NNNNNN.{png,pgm,ppm} in dir, ascending by index.
std::vector<FrameFile> ListFrames(const std::filesystem::path& dir);

// The frame file for index in dir, trying .png then .pgm then .ppm.
std::filesystem::path FindFrame(const std::filesystem::path& dir, int index);

}  // namespace densd
