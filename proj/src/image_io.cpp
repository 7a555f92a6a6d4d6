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

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>

#include "densd/error.hpp"

namespace densd {

namespace fs = std::filesystem;

namespace {

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Image ReadPng(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    Fail(ErrorCode::kIo, "cannot read PNG " + path.string() + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    Fail(ErrorCode::kIo, "cannot decode PNG " + path.string() + ": " + message);
  }
  if (!color) return GrayFrame(w, h, std::move(buffer));
  std::vector<Rgb> pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return RgbFrame(w, h, std::move(pixels));
}

void WritePng(const fs::path& path, const std::uint8_t* data, int w, int h, bool color) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    Fail(ErrorCode::kIo, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string PnmToken(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

Image ReadPnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  const std::string magic = PnmToken(in);
  if (magic != "P5" && magic != "P6") {
    Fail(ErrorCode::kIo, path.string() + ": only binary PGM (P5) and PPM (P6) are supported");
  }
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(PnmToken(in));
    h = std::stoi(PnmToken(in));
    maxval = std::stoi(PnmToken(in));
  } catch (const std::exception&) {
    Fail(ErrorCode::kIo, path.string() + ": malformed PNM header");
  }
  if (w < 1 || h < 1 || maxval != 255) {
    Fail(ErrorCode::kIo, path.string() + ": expected 8-bit PNM with positive dimensions");
  }
  const std::size_t channels = magic == "P6" ? 3 : 1;
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                                   channels);
  in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  if (static_cast<std::size_t>(in.gcount()) != buffer.size()) {
    Fail(ErrorCode::kIo, path.string() + ": truncated pixel data");
  }
  if (channels == 1) return GrayFrame(w, h, std::move(buffer));
  std::vector<Rgb> pixels(buffer.size() / 3);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return RgbFrame(w, h, std::move(pixels));
}

void WritePnm(const fs::path& path, const std::uint8_t* data, int w, int h, bool color) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << (color ? "P6" : "P5") << '\n' << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(static_cast<std::size_t>(w) * h * (color ? 3 : 1)));
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

Image ReadImage(const fs::path& path) {
  if (!fs::exists(path)) Fail(ErrorCode::kIo, "no such image: " + path.string());
  const std::string ext = Lower(path.extension().string());
  if (ext == ".png") return ReadPng(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return ReadPnm(path);
  Fail(ErrorCode::kIo, "unsupported image format: " + path.string());
}

GrayFrame ReadGray(const fs::path& path) {
  Image image = ReadImage(path);
  if (auto* gray = std::get_if<GrayFrame>(&image)) return std::move(*gray);
  return ToGray(std::get<RgbFrame>(image));
}

void WriteImage(const fs::path& path, const GrayFrame& frame) {
  const std::string ext = Lower(path.extension().string());
  if (ext == ".png") {
    WritePng(path, frame.data().data(), frame.width(), frame.height(), false);
  } else if (ext == ".pgm") {
    WritePnm(path, frame.data().data(), frame.width(), frame.height(), false);
  } else if (ext == ".ppm") {
    WriteImage(path, ToRgb(frame));
  } else {
    Fail(ErrorCode::kIo, "unsupported output format: " + path.string());
  }
}

void WriteImage(const fs::path& path, const RgbFrame& frame) {
  static_assert(sizeof(Rgb) == 3);
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(frame.data().data());
  const std::string ext = Lower(path.extension().string());
  if (ext == ".png") {
    WritePng(path, bytes, frame.width(), frame.height(), true);
  } else if (ext == ".ppm") {
    WritePnm(path, bytes, frame.width(), frame.height(), true);
  } else {
    Fail(ErrorCode::kIo, "unsupported output format for RGB: " + path.string());
  }
}

fs::path FrameFileName(int index, std::string_view extension) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%06d", index);
  return fs::path(std::string(name) + std::string(extension));
}

std::vector<FrameFile> ListFrames(const fs::path& dir) {
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<FrameFile> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    const std::string ext = Lower(entry.path().extension().string());
    if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
    if (stem.size() != 12 || stem.rfind("frame_", 0) != 0) continue;
    const std::string digits = stem.substr(6);
    if (!std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    frames.push_back({std::stoi(digits), entry.path()});
  }
  std::sort(frames.begin(), frames.end(), [](const FrameFile& a, const FrameFile& b) {
    return a.index != b.index ? a.index < b.index : a.path < b.path;
  });
  return frames;
}

fs::path FindFrame(const fs::path& dir, int index) {
  for (const char* ext : {".png", ".pgm", ".ppm"}) {
    fs::path candidate = dir / FrameFileName(index, ext);
    if (fs::exists(candidate)) return candidate;
  }
  return dir / FrameFileName(index, ".png");
}

}  // namespace densd
