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

#include <gtest/gtest.h>

#include "densd/error.hpp"
#include "support/test_util.hpp"

namespace densd {
namespace {

using testing_util::TempDir;
using testing_util::WriteFile;

TEST(RunConfig, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.edge_threshold, 128.0);
  EXPECT_EQ(c.relabel_tau, 64.5);
  EXPECT_EQ(c.rotation_deg, 10.0);
  EXPECT_EQ(c.brightness_factor, 1.2);
  EXPECT_EQ(c.lbp_mode, LbpMode::kPaper);
  EXPECT_FALSE(c.use_position);
  EXPECT_EQ(c.test_fraction, 0.2);
  EXPECT_EQ(c.cv_folds, 5);
  EXPECT_EQ(c.grid.size(), 75u);
  EXPECT_EQ(c.alert.tint_alpha, 0.35);
  EXPECT_EQ(c.alert.border_px, 4);
  EXPECT_EQ(c.alert.flash_period, 2);
  EXPECT_NO_THROW(c.Validate());
}

TEST(Toml, ParsesFlatPipelineTable) {
  const auto t = ParseToml(
      "# comment\n[pipeline]\nseed = 7\nlbp_mode = \"mean-code\"  # trailing\n"
      "use_position = true\ngrid_lr = [0.1, 0.5]\nrelabel_tau = 60.25\n");
  RunConfig c;
  ApplyToml(t, c);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.lbp_mode, LbpMode::kMeanCode);
  EXPECT_TRUE(c.use_position);
  EXPECT_EQ(c.grid.learning_rate, (std::vector<double>{0.1, 0.5}));
  EXPECT_EQ(c.relabel_tau, 60.25);
  EXPECT_EQ(c.grid.n_estimators.size(), 3u);
}

TEST(Toml, RejectsUnsupportedInput) {
  for (const char* text :
       {"seed = 1\n", "[other]\nseed = 1\n", "[pipeline]\nseed\n", "[pipeline]\nseed = 1\nseed = 2\n",
        "[pipeline]\nname = \"open\n", "[pipeline]\ngrid_lr = [0.1,\n", "[pipeline]\nx = abc\n"}) {
    SCOPED_TRACE(text);
    EXPECT_DENSD_ERROR(ParseToml(text), ErrorCode::kConfig);
  }
}

TEST(Toml, RejectsUnknownKeysAndWrongTypes) {
  RunConfig c;
  EXPECT_DENSD_ERROR(ApplyToml(ParseToml("[pipeline]\nsede = 1\n"), c), ErrorCode::kConfig);
  EXPECT_DENSD_ERROR(ApplyToml(ParseToml("[pipeline]\nseed = \"1\"\n"), c), ErrorCode::kConfig);
  EXPECT_DENSD_ERROR(ApplyToml(ParseToml("[pipeline]\ncv_folds = 2.5\n"), c), ErrorCode::kConfig);
  EXPECT_DENSD_ERROR(ApplyToml(ParseToml("[pipeline]\nlbp_mode = \"x\"\n"), c), ErrorCode::kConfig);
  EXPECT_DENSD_ERROR(ApplyToml(ParseToml("[pipeline]\nseed = -1\n"), c), ErrorCode::kConfig);
}

TEST(RunConfig, ValidationFlagsBadValues) {
  RunConfig c;
  c.test_fraction = 1.0;
  EXPECT_DENSD_ERROR(c.Validate(), ErrorCode::kConfig);
  c = {};
  c.gbm.learning_rate = 0.0;
  EXPECT_DENSD_ERROR(c.Validate(), ErrorCode::kConfig);
  c = {};
  c.alert.tint_alpha = 1.5;
  EXPECT_DENSD_ERROR(c.Validate(), ErrorCode::kConfig);
  c = {};
  c.grid.max_depth.clear();
  EXPECT_DENSD_ERROR(c.Validate(), ErrorCode::kConfig);
}

TEST(RunConfig, LoadFile) {
  TempDir dir;
  WriteFile(dir / "c.toml", "[pipeline]\nn_estimators = 20\nflash_period = 3\n");
  const RunConfig c = LoadConfigFile(dir / "c.toml");
  EXPECT_EQ(c.gbm.n_estimators, 20);
  EXPECT_EQ(c.alert.flash_period, 3);
  EXPECT_DENSD_ERROR(LoadConfigFile(dir / "none.toml"), ErrorCode::kConfig);
}

}  // namespace
}  // namespace densd
