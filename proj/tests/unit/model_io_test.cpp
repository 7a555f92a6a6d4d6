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

#include <json.hpp>

#include <gtest/gtest.h>

#include "densd/boosting.hpp"
#include "densd/error.hpp"
#include "densd/rng.hpp"
#include "support/test_util.hpp"

namespace densd {
namespace {

using testing_util::ReadFile;
using testing_util::TempDir;
using testing_util::WriteFile;

GbmModel SmallModel() {
  Rng rng(17);
  FeatureMatrix x;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    const int k = i % 3;
    const double row[3] = {k + 0.8 * rng.Uniform(), rng.Uniform(), 0.5};
    x.AppendRow(row);
    y.push_back(k);
  }
  GbmParams p;
  p.n_estimators = 8;
  p.max_depth = 3;
  p.learning_rate = 0.3;
  GbmModel m = GbmFit(x, y, p, {"edge_density", "avg_intensity", "lbp_texture"});
  m.feature_options.lbp_mode = LbpMode::kMeanCode;
  m.feature_options.edge_threshold = 100.0;
  return m;
}

TEST(ModelIo, RoundTripIsBitIdentical) {
  TempDir dir;
  const GbmModel m = SmallModel();
  SaveModel(m, dir / "m.json");
  const GbmModel back = LoadModel(dir / "m.json");
  EXPECT_EQ(back.trees, m.trees);
  EXPECT_EQ(back.scaler, m.scaler);
  EXPECT_EQ(back.init_scores, m.init_scores);
  EXPECT_EQ(back.importances, m.importances);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.feature_options.lbp_mode, LbpMode::kMeanCode);
  EXPECT_EQ(back.feature_options.edge_threshold, 100.0);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> v = {rng.Uniform() * 3, rng.Uniform(), rng.Uniform()};
    EXPECT_EQ(PredictProba(back, v), PredictProba(m, v));
  }
  SaveModel(back, dir / "again.json");
  EXPECT_EQ(ReadFile(dir / "again.json"), ReadFile(dir / "m.json"));
}

TEST(ModelIo, VersionMismatchIsIncompatible) {
  auto doc = nlohmann::json::parse(ModelToJson(SmallModel()));
  doc["version"] = "0";
  EXPECT_DENSD_ERROR(ModelFromJson(doc.dump()), ErrorCode::kIncompatibleModel);
}

TEST(ModelIo, TruncatedFileIsParseError) {
  TempDir dir;
  const std::string text = ModelToJson(SmallModel());
  WriteFile(dir / "t.json", text.substr(0, text.size() / 2));
  EXPECT_DENSD_ERROR(LoadModel(dir / "t.json"), ErrorCode::kParse);
  EXPECT_DENSD_ERROR(LoadModel(dir / "absent.json"), ErrorCode::kIo);
}

TEST(ModelIo, SchemaViolationsAreRejected) {
  const auto base = nlohmann::json::parse(ModelToJson(SmallModel()));
  const auto expect_parse = [](nlohmann::json doc) {
    EXPECT_DENSD_ERROR(ModelFromJson(doc.dump()), ErrorCode::kParse);
  };
  auto doc = base;
  doc.erase("scaler");
  expect_parse(doc);
  doc = base;
  doc["trees"].erase(doc["trees"].begin());
  expect_parse(doc);
  doc = base;
  doc["trees"][0][0][0]["left"] = 0;
  expect_parse(doc);
  doc = base;
  doc["trees"][0][0][0]["feature"] = 9;
  expect_parse(doc);
  doc = base;
  doc["classes"] = {0, 2, 1};
  expect_parse(doc);
  doc = base;
  doc["params"]["learning_rate"] = "fast";
  expect_parse(doc);
}

}  // namespace
}  // namespace densd
