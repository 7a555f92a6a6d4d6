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

#include "densd/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "densd/error.hpp"

namespace densd::csv {

namespace fs = std::filesystem;

std::vector<std::string> SplitLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string Fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string Exact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Reader::Reader(const fs::path& path) : path_(path), in_(path) {
  if (!in_) Fail(ErrorCode::kIo, "cannot open " + path.string());
}

void Reader::ExpectHeader(std::string_view expected) {
  std::string line;
  if (!std::getline(in_, line)) Error("missing header line");
  ++line_number_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    Error("unexpected header '" + line + "', expected '" + std::string(expected) + "'");
  }
}

bool Reader::Next(std::vector<std::string>& fields) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fields = SplitLine(line);
    return true;
  }
  return false;
}

void Reader::Error(const std::string& message) const {
  Fail(ErrorCode::kParse, path_.string() + ":" + std::to_string(line_number_) + ": " + message);
}

int Reader::Int(const std::string& field, std::string_view name) const {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    Error("field '" + std::string(name) + "' is not an integer: '" + field + "'");
  }
  return value;
}

double Reader::Double(const std::string& field, std::string_view name) const {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    Error("field '" + std::string(name) + "' is not a finite number: '" + field + "'");
  }
  return value;
}

std::ofstream OpenOutput(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace densd::csv
