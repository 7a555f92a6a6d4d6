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

#include "densd/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "densd/error.hpp"

namespace densd {

void RunConfig::Validate() const {
  const auto check = [](bool ok, const std::string& what) {
    Require(ok, ErrorCode::kConfig, "invalid configuration: " + what);
  };
  check(std::isfinite(edge_threshold) && edge_threshold >= 0.0, "edge_threshold must be >= 0");
  check(std::isfinite(relabel_tau), "relabel_tau must be finite");
  check(std::isfinite(rotation_deg), "rotation_deg must be finite");
  check(std::isfinite(brightness_factor) && brightness_factor > 0.0, "brightness_factor must be > 0");
  check(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction must lie in (0, 1)");
  check(cv_folds >= 2, "cv_folds must be >= 2");
  check(histogram_bins >= 1, "histogram_bins must be >= 1");
  check(jobs >= 1, "jobs must be >= 1");
  try {
    gbm.Validate();
    grid.Validate();
    alert.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, std::string("invalid configuration: ") + e.what());
  }
}

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing # comment that is not inside a string.
std::string StripComment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool ParseNumber(const std::string& text, double& out) {
  std::string cleaned;
  for (const char c : text) {
    if (c != '_') cleaned.push_back(c);
  }
  if (cleaned.empty()) return false;
  std::istringstream in(cleaned);
  in >> out;
  return in && in.peek() == std::char_traits<char>::eof() && std::isfinite(out);
}

}  // namespace

TomlTable ParseToml(const std::string& text, const std::string& source) {
  TomlTable table;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool in_pipeline = false;
  const auto fail = [&](const std::string& msg) {
    Fail(ErrorCode::kConfig, source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = Trim(StripComment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[pipeline]") fail("only a [pipeline] table is supported, found " + line);
      in_pipeline = true;
      continue;
    }
    if (!in_pipeline) fail("key outside the [pipeline] table");
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail("expected key = value");
    if (table.count(key)) fail("duplicate key '" + key + "'");

    if (value == "true" || value == "false") {
      table[key] = value == "true";
    } else if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') fail("unterminated string for '" + key + "'");
      table[key] = value.substr(1, value.size() - 2);
    } else if (value.front() == '[') {
      if (value.back() != ']') fail("arrays must fit on one line");
      std::vector<double> items;
      std::istringstream parts(value.substr(1, value.size() - 2));
      std::string part;
      while (std::getline(parts, part, ',')) {
        part = Trim(part);
        if (part.empty()) continue;
        double v = 0.0;
        if (!ParseNumber(part, v)) fail("array items must be numbers in '" + key + "'");
        items.push_back(v);
      }
      table[key] = std::move(items);
    } else {
      double v = 0.0;
      if (!ParseNumber(value, v)) fail("cannot parse value of '" + key + "'");
      table[key] = v;
    }
  }
  return table;
}

namespace {

template <typename T>
const T& Get(const TomlTable::value_type& kv, const char* type) {
  const T* v = std::get_if<T>(&kv.second);
  if (!v) Fail(ErrorCode::kConfig, "config key '" + kv.first + "' must be " + type);
  return *v;
}

int AsInt(const TomlTable::value_type& kv) {
  const double d = Get<double>(kv, "a number");
  if (d != std::floor(d)) Fail(ErrorCode::kConfig, "config key '" + kv.first + "' must be an integer");
  return static_cast<int>(d);
}

std::vector<int> AsIntList(const TomlTable::value_type& kv) {
  std::vector<int> out;
  for (const double d : Get<std::vector<double>>(kv, "an array")) {
    if (d != std::floor(d)) Fail(ErrorCode::kConfig, "config key '" + kv.first + "' needs integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

}  // namespace

void ApplyToml(const TomlTable& table, RunConfig& c) {
  for (const auto& kv : table) {
    const std::string& key = kv.first;
    if (key == "seed") {
      const double d = Get<double>(kv, "a number");
      if (d < 0 || d != std::floor(d) || d > 9007199254740992.0) {
        Fail(ErrorCode::kConfig, "seed must be a non-negative integer (use --seed for full 64-bit values)");
      }
      c.seed = static_cast<std::uint64_t>(d);
    } else if (key == "edge_threshold") {
      c.edge_threshold = Get<double>(kv, "a number");
    } else if (key == "relabel_tau") {
      c.relabel_tau = Get<double>(kv, "a number");
    } else if (key == "rotation_deg") {
      c.rotation_deg = Get<double>(kv, "a number");
    } else if (key == "brightness_factor") {
      c.brightness_factor = Get<double>(kv, "a number");
    } else if (key == "lbp_mode") {
      const auto mode = ParseLbpMode(Get<std::string>(kv, "a string"));
      if (!mode) Fail(ErrorCode::kConfig, "lbp_mode must be \"paper\" or \"mean-code\"");
      c.lbp_mode = *mode;
    } else if (key == "use_position") {
      c.use_position = Get<bool>(kv, "a bool");
    } else if (key == "test_fraction") {
      c.test_fraction = Get<double>(kv, "a number");
    } else if (key == "cv_folds") {
      c.cv_folds = AsInt(kv);
    } else if (key == "grid_estimators") {
      c.grid.n_estimators = AsIntList(kv);
    } else if (key == "grid_lr") {
      c.grid.learning_rate = Get<std::vector<double>>(kv, "an array");
    } else if (key == "grid_depth") {
      c.grid.max_depth = AsIntList(kv);
    } else if (key == "tune") {
      c.tune = Get<bool>(kv, "a bool");
    } else if (key == "n_estimators") {
      c.gbm.n_estimators = AsInt(kv);
    } else if (key == "learning_rate") {
      c.gbm.learning_rate = Get<double>(kv, "a number");
    } else if (key == "max_depth") {
      c.gbm.max_depth = AsInt(kv);
    } else if (key == "min_samples_split") {
      c.gbm.min_samples_split = AsInt(kv);
    } else if (key == "tint_alpha") {
      c.alert.tint_alpha = Get<double>(kv, "a number");
    } else if (key == "border_px") {
      c.alert.border_px = AsInt(kv);
    } else if (key == "flash_period") {
      c.alert.flash_period = AsInt(kv);
    } else if (key == "histogram_bins") {
      c.histogram_bins = AsInt(kv);
    } else if (key == "continue_on_error") {
      c.continue_on_error = Get<bool>(kv, "a bool");
    } else if (key == "jobs") {
      c.jobs = AsInt(kv);
    } else {
      Fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
    }
  }
}

RunConfig LoadConfigFile(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kConfig, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ApplyToml(ParseToml(buf.str(), path.string()), base);
  return base;
}

}  // namespace densd
