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

#include "densd/alert.hpp"

#include <gtest/gtest.h>

#include "densd/dataset.hpp"
#include "densd/error.hpp"
#include "densd/image_io.hpp"
#include "support/test_util.hpp"

namespace densd {
namespace {

using testing_util::ReadFile;
using testing_util::TempDir;

FramePrediction Pred(int frame, Density label) {
  FramePrediction p;
  p.frame = frame;
  p.label = label;
  p.probabilities[ToIndex(label)] = 0.75;
  p.probabilities[(ToIndex(label) + 1) % 3] = 0.25;
  return p;
}

SynthSpec SmallSpec(Density d) {
  SynthSpec s;
  s.width = 96;
  s.height = 72;
  s.density = d;
  return s;
}

GbmModel TrainSmallModel() {
  std::vector<DatasetRow> rows;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Density d = *DensityFromIndex(static_cast<int>(seed % 3));
    const GrayFrame f = Synthesize(SmallSpec(d), 1000 + seed).frame;
    DatasetRow r;
    r.region = f.bounds();
    r.features = ExtractFeatures(f, r.region);
    r.label = d;
    rows.push_back(r);
  }
  const auto ids = DefaultFeatureSet(false);
  GbmParams p;
  p.n_estimators = 30;
  p.max_depth = 3;
  p.learning_rate = 0.3;
  return GbmFit(BuildMatrix(rows, ids), LabelIndices(rows), p,
                {"area", "edge_density", "avg_intensity", "lbp_texture"});
}

TEST(AlertStyle, Validation) {
  AlertStyle s;
  EXPECT_NO_THROW(s.Validate());
  s.tint_alpha = 0.0;
  EXPECT_DENSD_ERROR(s.Validate(), ErrorCode::kInvalidArgument);
  s = {};
  s.border_px = 0;
  EXPECT_DENSD_ERROR(s.Validate(), ErrorCode::kInvalidArgument);
  s = {};
  s.flash_period = 0;
  EXPECT_DENSD_ERROR(s.Validate(), ErrorCode::kInvalidArgument);
}

TEST(Annotate, NonAlertPassesThrough) {
  const GrayFrame f(12, 10, std::uint8_t{200});
  EXPECT_EQ(Annotate(f, Density::kModerate, {}, -1), ToRgb(f));
  EXPECT_EQ(Annotate(f, Density::kOvercrowded, {}, -1), ToRgb(f));
}

TEST(Annotate, TintPhaseBlend) {
  const GrayFrame f(12, 10, std::uint8_t{200});
  const RgbFrame out = Annotate(f, Density::kVeryDense, {}, 0);
  EXPECT_EQ(out.at(6, 5), (Rgb{219, 130, 130}));
  EXPECT_EQ(out.at(0, 0), (Rgb{255, 0, 0}));
  EXPECT_EQ(out.at(11, 9), (Rgb{255, 0, 0}));
  EXPECT_EQ(out.at(3, 5), (Rgb{255, 0, 0}));
  EXPECT_EQ(out.at(4, 5), (Rgb{219, 130, 130}));
}

TEST(Annotate, OffPhaseIsBorderOnly) {
  const GrayFrame f(12, 10, std::uint8_t{200});
  const RgbFrame out = Annotate(f, Density::kVeryDense, {}, 1);
  EXPECT_EQ(out.at(6, 5), (Rgb{200, 200, 200}));
  EXPECT_EQ(out.at(1, 1), (Rgb{255, 0, 0}));
}

TEST(Annotate, TintRegionOnly) {
  AlertStyle s;
  s.border_px = 1;
  s.tint_region = Rect{5, 5, 2, 2};
  const RgbFrame out = Annotate(GrayFrame(12, 10, std::uint8_t{200}), Density::kVeryDense, s, 0);
  EXPECT_EQ(out.at(5, 5), (Rgb{219, 130, 130}));
  EXPECT_EQ(out.at(3, 3), (Rgb{200, 200, 200}));
}

TEST(FlashPhases, RunsRestartOnGapsAndOtherLabels) {
  const std::vector<FramePrediction> p = {
      Pred(0, Density::kVeryDense), Pred(1, Density::kVeryDense), Pred(2, Density::kVeryDense),
      Pred(3, Density::kVeryDense), Pred(4, Density::kModerate),  Pred(5, Density::kVeryDense),
      Pred(7, Density::kVeryDense)};
  EXPECT_EQ(FlashPhases(p), (std::vector<int>{0, 1, 2, 3, -1, 0, 0}));
}

TEST(PredictionsCsv, RoundTrip) {
  TempDir dir;
  std::vector<FramePrediction> p = {Pred(3, Density::kOvercrowded), Pred(4, Density::kVeryDense)};
  p[0].features.edge_density = 12.5;
  WritePredictionsCsv(dir / "p.csv", p);
  const auto back = ReadPredictionsCsv(dir / "p.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].frame, 3);
  EXPECT_EQ(back[1].label, Density::kVeryDense);
  EXPECT_EQ(back[1].probabilities[2], 0.75);
  EXPECT_EQ(back[0].features.edge_density, 12.5);
  const std::string text = ReadFile(dir / "p.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), kPredictionsHeader);
}

TEST(EmitAnnotatedSequence, FourFrameRun) {
  TempDir dir;
  std::filesystem::create_directories(dir / "in");
  std::vector<FramePrediction> preds;
  for (int i = 0; i < 5; ++i) {
    WriteImage(dir / "in" / FrameFileName(i), GrayFrame(16, 12, std::uint8_t{200}));
  }
  preds.push_back(Pred(0, Density::kModerate));
  for (int i = 1; i <= 4; ++i) preds.push_back(Pred(i, Density::kVeryDense));
  EXPECT_EQ(EmitAnnotatedSequence(preds, dir / "in", dir / "out", {}), 5u);
  const auto interior = [&](int i) {
    return std::get<RgbFrame>(ReadImage(dir / "out" / FrameFileName(i))).at(8, 6);
  };
  EXPECT_EQ(interior(0), (Rgb{200, 200, 200}));
  EXPECT_EQ(interior(1), (Rgb{219, 130, 130}));
  EXPECT_EQ(interior(2), (Rgb{200, 200, 200}));
  EXPECT_EQ(interior(3), (Rgb{219, 130, 130}));
  EXPECT_EQ(interior(4), (Rgb{200, 200, 200}));
  EXPECT_EQ(ReadFile(dir / "out" / "alerts.log"),
            "1,very_dense,0.75\n2,very_dense,0.75\n3,very_dense,0.75\n4,very_dense,0.75\n");
}

TEST(EmitAnnotatedSequence, NoAlertsMeansPassThrough) {
  TempDir dir;
  std::filesystem::create_directories(dir / "in");
  std::vector<FramePrediction> preds;
  for (int i = 0; i < 3; ++i) {
    WriteImage(dir / "in" / FrameFileName(i, ".pgm"), GrayFrame(8, 8, static_cast<std::uint8_t>(i * 40)));
    preds.push_back(Pred(i, Density::kOvercrowded));
  }
  EXPECT_EQ(EmitAnnotatedSequence(preds, dir / "in", dir / "out", {}), 3u);
  EXPECT_EQ(ReadFile(dir / "out" / "alerts.log"), "");
  for (int i = 0; i < 3; ++i) {
    const Image img = ReadImage(dir / "out" / FrameFileName(i, ".ppm"));
    EXPECT_EQ(std::get<RgbFrame>(img), ToRgb(GrayFrame(8, 8, static_cast<std::uint8_t>(i * 40))));
  }
}

TEST(EmitAnnotatedSequence, MissingInputNamesLastWritten) {
  TempDir dir;
  std::filesystem::create_directories(dir / "in");
  WriteImage(dir / "in" / FrameFileName(0), GrayFrame(8, 8));
  const std::vector<FramePrediction> preds = {Pred(0, Density::kModerate),
                                              Pred(1, Density::kModerate)};
  try {
    EmitAnnotatedSequence(preds, dir / "in", dir / "out", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("last frame written in order: 0"), std::string::npos)
        << e.what();
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / FrameFileName(0)));
}

TEST(ClassifySequence, EmptyDirectoryIsEmptyInput) {
  TempDir dir;
  std::filesystem::create_directories(dir / "frames");
  EXPECT_DENSD_ERROR(ClassifySequence(GbmModel{}, dir / "frames"), ErrorCode::kEmptyInput);
}

TEST(ClassifySequence, VeryDenseFramesAreFlagged) {
  TempDir dir;
  const GbmModel model = TrainSmallModel();
  std::filesystem::create_directories(dir / "vd");
  for (int i = 0; i < 6; ++i) {
    WriteImage(dir / "vd" / FrameFileName(i), Synthesize(SmallSpec(Density::kVeryDense), 50 + i).frame);
  }
  const SequenceResult r = ClassifySequence(model, dir / "vd");
  ASSERT_EQ(r.predictions.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(r.predictions[i].frame, i);
    EXPECT_EQ(r.predictions[i].label, Density::kVeryDense);
    const auto& pr = r.predictions[i].probabilities;
    EXPECT_NEAR(pr[0] + pr[1] + pr[2], 1.0, 1e-12);
  }
}

TEST(ClassifySequence, ContinueOnErrorRecordsFailures) {
  TempDir dir;
  const GbmModel model = TrainSmallModel();
  std::filesystem::create_directories(dir / "f");
  WriteImage(dir / "f" / FrameFileName(0), Synthesize(SmallSpec(Density::kModerate), 1).frame);
  testing_util::WriteFile(dir / "f" / FrameFileName(1), "garbage");
  EXPECT_DENSD_ERROR(ClassifySequence(model, dir / "f"), ErrorCode::kIo);
  const SequenceResult r = ClassifySequence(model, dir / "f", std::nullopt, true);
  EXPECT_EQ(r.predictions.size(), 1u);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].frame, 1);
}

}  // namespace
}  // namespace densd
