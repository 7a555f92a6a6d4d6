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
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace densd::csv {

// Plain comma splitting; fields in this project's formats never contain
// commas or quotes. A trailing '\r' is dropped.
std::vector<std::string> SplitLine(std::string_view line);

// Up to 6 decimal places, trailing zeros trimmed ("25", "0.003906").
std::string Fixed6(double value);

// 17 significant digits; round-trips every double.
std::string Exact(double value);

// Line-oriented reader that tracks line numbers for error messages.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  // Throws kParse unless the first line equals expected.
  void ExpectHeader(std::string_view expected);

  // Next non-blank data line split into fields; false at end of file.
  bool Next(std::vector<std::string>& fields);

  int line_number() const { return line_number_; }
  const std::filesystem::path& path() const { return path_; }

  [[noreturn]] void Error(const std::string& message) const;

  int Int(const std::string& field, std::string_view name) const;
  double Double(const std::string& field, std::string_view name) const;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  int line_number_ = 0;
};

// Opens path for writing or throws kIo.
std::ofstream OpenOutput(const std::filesystem::path& path);

}  // namespace densd::csv
