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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "densd/alert.hpp"
#include "densd/boosting.hpp"
#include "densd/features.hpp"
#include "densd/tuning.hpp"

namespace densd {

struct RunConfig {
  std::uint64_t seed = 42;
  double edge_threshold = 128.0;
  double relabel_tau = 64.5;
  double rotation_deg = 10.0;
  double brightness_factor = 1.2;
  LbpMode lbp_mode = LbpMode::kPaper;
  bool use_position = false;
  double test_fraction = 0.2;
  int cv_folds = 5;
  ParamGrid grid = ParamGrid::Reference();
  bool tune = false;
  GbmParams gbm;
  AlertStyle alert;
  int histogram_bins = 20;
  bool continue_on_error = false;
  int jobs = 1;

  FeatureOptions feature_options() const { return {edge_threshold, lbp_mode}; }
  void Validate() const;
};

// Minimal reader for the flat TOML subset used by config files: one
// [pipeline] table of key = value lines, where a value is a bool, number,
// double-quoted string or a one-line array of numbers.
using TomlValue = std::variant<bool, double, std::string, std::vector<double>>;
using TomlTable = std::map<std::string, TomlValue>;

TomlTable ParseToml(const std::string& text, const std::string& source = "<config>");

// Applies a parsed [pipeline] table on top of config. Unknown keys and
// mistyped values raise kConfig.
void ApplyToml(const TomlTable& table, RunConfig& config);
RunConfig LoadConfigFile(const std::filesystem::path& path, RunConfig base = {});

}  // namespace densd
