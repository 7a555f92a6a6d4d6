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

#include <algorithm>
#include <cmath>

#include "densd/csv.hpp"
#include "densd/dataset.hpp"
#include "densd/error.hpp"
#include "densd/image_io.hpp"
#include "densd/parallel.hpp"

namespace densd {

namespace fs = std::filesystem;

void AlertStyle::Validate() const {
  Require(tint_alpha > 0.0 && tint_alpha <= 1.0, ErrorCode::kInvalidArgument,
          "tint_alpha must lie in (0, 1]");
  Require(border_px >= 1, ErrorCode::kInvalidArgument, "border_px must be >= 1");
  Require(flash_period >= 1, ErrorCode::kInvalidArgument, "flash_period must be >= 1");
}

SequenceResult ClassifySequence(const GbmModel& model, const fs::path& frames_dir,
                                std::optional<Region> region, bool continue_on_error) {
  const auto files = ListFrames(frames_dir);
  Require(!files.empty(), ErrorCode::kEmptyInput, "no frame_NNNNNN images in " + frames_dir.string());
  const auto ids = ModelFeatureIds(model);

  std::vector<std::optional<FramePrediction>> slots(files.size());
  std::vector<std::optional<FrameFailure>> failures(files.size());
  ParallelFor(files.size(), [&](std::size_t i) {
    try {
      const GrayFrame frame = ReadGray(files[i].path);
      FramePrediction p;
      p.frame = files[i].index;
      p.features = ExtractFeatures(frame, region.value_or(frame.bounds()), model.feature_options);
      const auto proba = PredictProba(model, SelectFeatures(p.features, ids));
      std::copy(proba.begin(), proba.end(), p.probabilities.begin());
      p.label = static_cast<Density>(ArgMax(proba));
      slots[i] = p;
    } catch (const Error& e) {
      if (!continue_on_error) {
        throw Error(e.code(), files[i].path.string() + ": " + e.what());
      }
      failures[i] = FrameFailure{files[i].index, files[i].path, e.what()};
    }
  });

  SequenceResult result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (slots[i]) result.predictions.push_back(*slots[i]);
    if (failures[i]) result.failures.push_back(*failures[i]);
  }
  return result;
}

void WritePredictionsCsv(const fs::path& path, std::span<const FramePrediction> predictions) {
  auto out = csv::OpenOutput(path);
  out << kPredictionsHeader << '\n';
  for (const auto& p : predictions) {
    const auto& f = p.features;
    out << p.frame << ',' << DensityName(p.label);
    for (const double v : p.probabilities) out << ',' << csv::Fixed6(v);
    out << ',' << csv::Fixed6(f.area) << ',' << csv::Fixed6(f.x_center) << ','
        << csv::Fixed6(f.y_center) << ',' << csv::Fixed6(f.edge_density) << ','
        << csv::Fixed6(f.avg_intensity) << ',' << csv::Fixed6(f.lbp_texture) << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<FramePrediction> ReadPredictionsCsv(const fs::path& path) {
  csv::Reader reader(path);
  reader.ExpectHeader(kPredictionsHeader);
  std::vector<FramePrediction> out;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    if (f.size() != 11) reader.Error("expected 11 fields, found " + std::to_string(f.size()));
    FramePrediction p;
    p.frame = reader.Int(f[0], "frame");
    const auto label = ParseDensity(f[1]);
    if (!label) reader.Error("unknown label '" + f[1] + "'");
    p.label = *label;
    for (int k = 0; k < kNumClasses; ++k) {
      p.probabilities[static_cast<std::size_t>(k)] = reader.Double(f[2 + static_cast<std::size_t>(k)], "probability");
    }
    p.features.area = reader.Double(f[5], "area");
    p.features.x_center = reader.Double(f[6], "x_center");
    p.features.y_center = reader.Double(f[7], "y_center");
    p.features.edge_density = reader.Double(f[8], "edge_density");
    p.features.avg_intensity = reader.Double(f[9], "avg_intensity");
    p.features.lbp_texture = reader.Double(f[10], "lbp_texture");
    out.push_back(p);
  }
  return out;
}

std::vector<int> FlashPhases(std::span<const FramePrediction> predictions) {
  std::vector<int> phases(predictions.size(), -1);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].label != Density::kVeryDense) continue;
    const bool continues = i > 0 && phases[i - 1] >= 0 &&
                           predictions[i].frame == predictions[i - 1].frame + 1;
    phases[i] = continues ? phases[i - 1] + 1 : 0;
  }
  return phases;
}

RgbFrame Annotate(const RgbFrame& frame, Density label, const AlertStyle& style, int phase) {
  style.Validate();
  RgbFrame out = frame;
  if (label != Density::kVeryDense) return out;

  const int w = out.width();
  const int h = out.height();
  if (phase >= 0 && phase % style.flash_period == 0) {
    const Rect area = style.tint_region ? Intersect(*style.tint_region, {0, 0, w, h}) : Rect{0, 0, w, h};
    const double a = style.tint_alpha;
    const auto blend = [a](double v, double target) {
      return static_cast<std::uint8_t>(std::lround(std::clamp((1.0 - a) * v + a * target, 0.0, 255.0)));
    };
    for (int y = area.y; y < area.y + area.h; ++y) {
      for (int x = area.x; x < area.x + area.w; ++x) {
        Rgb& p = out.at(x, y);
        p = {blend(p.r, 255.0), blend(p.g, 0.0), blend(p.b, 0.0)};
      }
    }
  }
  const int b = style.border_px;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x < b || y < b || x >= w - b || y >= h - b) out.at(x, y) = {255, 0, 0};
    }
  }
  return out;
}

RgbFrame Annotate(const GrayFrame& frame, Density label, const AlertStyle& style, int phase) {
  return Annotate(ToRgb(frame), label, style, phase);
}

std::size_t EmitAnnotatedSequence(std::span<const FramePrediction> predictions,
                                  const fs::path& frames_dir, const fs::path& out_dir,
                                  const AlertStyle& style) {
  style.Validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    Fail(ErrorCode::kIo, "cannot create output directory " + out_dir.string());
  }

  {
    auto log = csv::OpenOutput(out_dir / "alerts.log");
    for (const auto& p : predictions) {
      if (p.label != Density::kVeryDense) continue;
      log << p.frame << ',' << DensityName(p.label) << ','
          << csv::Fixed6(p.probabilities[static_cast<std::size_t>(ToIndex(p.label))]) << '\n';
    }
    if (!log) Fail(ErrorCode::kIo, "write failed for alerts.log");
  }

  const auto phases = FlashPhases(predictions);
  std::vector<char> written(predictions.size(), 0);
  try {
    ParallelFor(predictions.size(), [&](std::size_t i) {
      const auto& p = predictions[i];
      const fs::path in = FindFrame(frames_dir, p.frame);
      std::string ext = in.extension().string();
      if (ext == ".pgm") ext = ".ppm";
      const fs::path out = out_dir / FrameFileName(p.frame, ext);
      const Image image = ReadImage(in);
      const RgbFrame annotated = std::visit(
          [&](const auto& f) { return Annotate(f, p.label, style, phases[i]); }, image);
      WriteImage(out, annotated);
      written[i] = 1;
    });
  } catch (const Error& e) {
    int last = -1;
    for (std::size_t i = 0; i < predictions.size() && written[i]; ++i) last = predictions[i].frame;
    Fail(ErrorCode::kIo, std::string(e.what()) + " (last frame written in order: " +
                             (last < 0 ? std::string("none") : std::to_string(last)) + ")");
  }
  return predictions.size();
}

}  // namespace densd
