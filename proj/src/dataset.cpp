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

#include "densd/dataset.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "densd/csv.hpp"
#include "densd/error.hpp"
#include "densd/image_io.hpp"
#include "densd/parallel.hpp"
#include "densd/rng.hpp"

namespace densd {

namespace fs = std::filesystem;

std::string_view OriginName(Origin origin) {
  switch (origin) {
    case Origin::kOriginal: return "original";
    case Origin::kRotated: return "rotated";
    case Origin::kBrightened: return "brightened";
  }
  return "original";
}

namespace {

std::optional<Origin> ParseOrigin(std::string_view s) {
  if (s == "original") return Origin::kOriginal;
  if (s == "rotated") return Origin::kRotated;
  if (s == "brightened") return Origin::kBrightened;
  return std::nullopt;
}

std::string FrameLabel(const std::string& video_id, int frame) {
  return "(" + video_id + ", " + std::to_string(frame) + ")";
}

Density ParseLabelField(const csv::Reader& reader, const std::string& field) {
  const auto label = ParseDensity(field);
  if (!label) reader.Error("unknown label '" + field + "'");
  return *label;
}

// Columns shared by the feature and prepared CSVs, up to and including label.
void WriteFeatureColumns(std::ostream& out, const DatasetRow& r, bool include_label) {
  const auto& f = r.features;
  out << r.video_id << ',' << r.frame << ',' << r.region.x << ',' << r.region.y << ','
      << r.region.w << ',' << r.region.h << ',' << csv::Fixed6(f.area) << ','
      << csv::Fixed6(f.x_center) << ',' << csv::Fixed6(f.y_center) << ','
      << csv::Fixed6(f.edge_density) << ',' << csv::Fixed6(f.avg_intensity) << ','
      << csv::Fixed6(f.lbp_texture) << ',';
  if (include_label) out << DensityName(r.label);
}

DatasetRow ReadFeatureColumns(const csv::Reader& reader, const std::vector<std::string>& f) {
  DatasetRow r;
  r.video_id = f[0];
  if (r.video_id.empty()) reader.Error("empty video_id");
  r.frame = reader.Int(f[1], "frame");
  if (r.frame < 0) reader.Error("frame index must be >= 0");
  r.region = {reader.Int(f[2], "x"), reader.Int(f[3], "y"), reader.Int(f[4], "w"),
              reader.Int(f[5], "h")};
  r.features.area = reader.Double(f[6], "area");
  r.features.x_center = reader.Double(f[7], "x_center");
  r.features.y_center = reader.Double(f[8], "y_center");
  r.features.edge_density = reader.Double(f[9], "edge_density");
  r.features.avg_intensity = reader.Double(f[10], "avg_intensity");
  r.features.lbp_texture = reader.Double(f[11], "lbp_texture");
  r.label = ParseLabelField(reader, f[12]);
  return r;
}

}  // namespace

std::vector<LabeledRegion> ParseLabels(const fs::path& path) {
  csv::Reader reader(path);
  reader.ExpectHeader(kLabelHeader);
  std::vector<LabeledRegion> rows;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    if (f.size() != 7) {
      reader.Error("expected 7 fields, found " + std::to_string(f.size()));
    }
    LabeledRegion r;
    r.video_id = f[0];
    if (r.video_id.empty()) reader.Error("empty video_id");
    r.frame = reader.Int(f[1], "frame");
    if (r.frame < 0) reader.Error("frame index must be >= 0");
    r.region = {reader.Int(f[2], "x"), reader.Int(f[3], "y"), reader.Int(f[4], "w"),
                reader.Int(f[5], "h")};
    if (r.region.w <= 0 || r.region.h <= 0) reader.Error("region extent must be positive");
    r.label = ParseLabelField(reader, f[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void WriteLabels(const fs::path& path, std::span<const LabeledRegion> rows) {
  auto out = csv::OpenOutput(path);
  out << kLabelHeader << '\n';
  for (const auto& r : rows) {
    out << r.video_id << ',' << r.frame << ',' << r.region.x << ',' << r.region.y << ','
        << r.region.w << ',' << r.region.h << ',' << DensityName(r.label) << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<LabeledRegion> DedupPerFrame(std::span<const LabeledRegion> rows) {
  struct Group {
    LabeledRegion first;
    Region box;
    ClassCounts votes{};
  };
  std::map<std::pair<std::string, int>, std::size_t> slot;
  std::vector<Group> groups;
  for (const auto& r : rows) {
    auto [it, inserted] = slot.try_emplace({r.video_id, r.frame}, groups.size());
    if (inserted) {
      groups.push_back({r, r.region, {}});
    } else {
      groups[it->second].box = BoundingBox(groups[it->second].box, r.region);
    }
    ++groups[it->second].votes[ToIndex(r.label)];
  }

  std::vector<LabeledRegion> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    int winner = 0;
    for (int k = 1; k < kNumClasses; ++k) {
      if (g.votes[k] >= g.votes[winner]) winner = k;  // >= : ties go to the more severe class
    }
    LabeledRegion r = g.first;
    r.region = g.box;
    r.label = static_cast<Density>(winner);
    out.push_back(std::move(r));
  }
  return out;
}

std::size_t ThresholdRelabel(std::span<DatasetRow> rows, double tau) {
  std::size_t changed = 0;
  for (auto& r : rows) {
    if (r.features.edge_density > tau && r.label != Density::kVeryDense) {
      r.label = Density::kVeryDense;
      ++changed;
    }
  }
  return changed;
}

FrameSource DirectoryFrameSource(const fs::path& root) {
  return [root](const std::string& video_id, int frame) {
    const fs::path path = FindFrame(root / video_id, frame);
    if (!fs::exists(path)) {
      Fail(ErrorCode::kIo, "missing frame " + FrameLabel(video_id, frame) + " at " + path.string());
    }
    return ReadGray(path);
  };
}

std::vector<DatasetRow> ExtractRows(std::span<const LabeledRegion> regions,
                                    const FrameSource& frames, const FeatureOptions& options) {
  std::vector<DatasetRow> out(regions.size());
  ParallelFor(regions.size(), [&](std::size_t i) {
    const auto& src = regions[i];
    const GrayFrame frame = frames(src.video_id, src.frame);
    DatasetRow& row = out[i];
    row.video_id = src.video_id;
    row.frame = src.frame;
    row.region = src.region;
    row.features = ExtractFeatures(frame, src.region, options);
    row.label = src.label;
    row.origin = Origin::kOriginal;
  });
  return out;
}

std::vector<DatasetRow> Augment(std::span<const DatasetRow> rows, const FrameSource& frames,
                                const AugmentOptions& options) {
  std::vector<DatasetRow> out(rows.size() * 3);
  ParallelFor(rows.size(), [&](std::size_t i) {
    const DatasetRow& src = rows[i];
    const GrayFrame frame = frames(src.video_id, src.frame);

    DatasetRow& original = out[3 * i];
    original = src;
    original.origin = Origin::kOriginal;

    DatasetRow& rotated = out[3 * i + 1];
    rotated = src;
    rotated.origin = Origin::kRotated;
    rotated.features =
        ExtractFeatures(Rotate(frame, options.rotation_deg), src.region, options.features);

    DatasetRow& brightened = out[3 * i + 2];
    brightened = src;
    brightened.origin = Origin::kBrightened;
    brightened.features = ExtractFeatures(AdjustBrightness(frame, options.brightness_factor),
                                          src.region, options.features);
  });
  return out;
}

std::vector<DatasetRow> Oversample(std::span<const DatasetRow> rows, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < rows.size(); ++i) members[ToIndex(rows[i].label)].push_back(i);
  std::size_t majority = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    Require(!members[k].empty(), ErrorCode::kEmptyClass,
            "cannot oversample: class '" + std::string(kDensityNames[k]) + "' has no rows");
    majority = std::max(majority, members[k].size());
  }

  std::vector<DatasetRow> out(rows.begin(), rows.end());
  out.reserve(majority * kNumClasses);
  Rng rng(seed);
  for (int k = 0; k < kNumClasses; ++k) {
    const auto& pool = members[k];
    for (std::size_t n = pool.size(); n < majority; ++n) {
      out.push_back(rows[pool[rng.Below(pool.size())]]);
    }
  }
  return out;
}

ScalerParams ScalerFit(const FeatureMatrix& x) {
  Require(x.rows() >= 2, ErrorCode::kInsufficientData,
          "scaler needs at least 2 rows, got " + std::to_string(x.rows()));
  ScalerParams p;
  p.means.assign(x.cols(), 0.0);
  p.stds.assign(x.cols(), 0.0);
  const auto n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) sum += x(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double d = x(r, c) - mean;
      ss += d * d;
    }
    p.means[c] = mean;
    p.stds[c] = std::sqrt(ss / n);
  }
  return p;
}

std::vector<double> ScalerApply(const ScalerParams& params, std::span<const double> x) {
  Require(x.size() == params.size(), ErrorCode::kInvalidArgument,
          "scaler expects " + std::to_string(params.size()) + " features, got " +
              std::to_string(x.size()));
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = params.IsConstant(i) ? 0.0 : (x[i] - params.means[i]) / params.stds[i];
  }
  return z;
}

FeatureMatrix ScalerApply(const ScalerParams& params, const FeatureMatrix& x) {
  Require(x.cols() == params.size(), ErrorCode::kInvalidArgument,
          "scaler dimension mismatch");
  FeatureMatrix z(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto scaled = ScalerApply(params, x.row(r));
    std::copy(scaled.begin(), scaled.end(), z.row(r).begin());
  }
  return z;
}

std::vector<double> SelectFeatures(const FeatureVector& v, std::span<const FeatureId> features) {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto id : features) out.push_back(FeatureValue(v, id));
  return out;
}

FeatureMatrix BuildMatrix(std::span<const DatasetRow> rows, std::span<const FeatureId> features) {
  FeatureMatrix x(rows.size(), features.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < features.size(); ++c) {
      x(r, c) = FeatureValue(rows[r].features, features[c]);
    }
  }
  return x;
}

std::vector<int> LabelIndices(std::span<const DatasetRow> rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(ToIndex(r.label));
  return y;
}

SplitResult Split(std::span<const DatasetRow> rows, double test_fraction, std::uint64_t seed) {
  Require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::kInvalidArgument,
          "test_fraction must lie in (0, 1)");
  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < rows.size(); ++i) members[ToIndex(rows[i].label)].push_back(i);

  std::vector<bool> is_test(rows.size(), false);
  Rng rng(seed);
  for (int k = 0; k < kNumClasses; ++k) {
    auto& pool = members[k];
    if (pool.empty()) continue;
    Require(pool.size() >= 2, ErrorCode::kInsufficientData,
            "class '" + std::string(kDensityNames[k]) + "' has fewer than 2 rows to split");
    rng.Shuffle(std::span<std::size_t>(pool));
    const auto n_test = static_cast<std::size_t>(std::lround(pool.size() * test_fraction));
    for (std::size_t j = 0; j < n_test; ++j) is_test[pool[j]] = true;
  }

  SplitResult out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    (is_test[i] ? out.test : out.train).push_back(rows[i]);
  }
  return out;
}

void WriteFeatureCsv(const fs::path& path, std::span<const DatasetRow> rows, bool include_labels) {
  auto out = csv::OpenOutput(path);
  out << kFeatureHeader << '\n';
  for (const auto& r : rows) {
    WriteFeatureColumns(out, r, include_labels);
    out << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<DatasetRow> ReadFeatureCsv(const fs::path& path) {
  csv::Reader reader(path);
  reader.ExpectHeader(kFeatureHeader);
  std::vector<DatasetRow> rows;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    if (f.size() != 13) reader.Error("expected 13 fields, found " + std::to_string(f.size()));
    rows.push_back(ReadFeatureColumns(reader, f));
  }
  return rows;
}

void WritePreparedCsv(const fs::path& path, const SplitResult& data) {
  auto out = csv::OpenOutput(path);
  out << kPreparedHeader << '\n';
  for (const auto* side : {&data.train, &data.test}) {
    const char* split = side == &data.train ? "train" : "test";
    for (const auto& r : *side) {
      WriteFeatureColumns(out, r, true);
      out << ',' << OriginName(r.origin) << ',' << split << '\n';
    }
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

SplitResult ReadPreparedCsv(const fs::path& path) {
  csv::Reader reader(path);
  reader.ExpectHeader(kPreparedHeader);
  SplitResult data;
  std::vector<std::string> f;
  while (reader.Next(f)) {
    if (f.size() != 15) reader.Error("expected 15 fields, found " + std::to_string(f.size()));
    DatasetRow r = ReadFeatureColumns(reader, f);
    const auto origin = ParseOrigin(f[13]);
    if (!origin) reader.Error("unknown origin '" + f[13] + "'");
    r.origin = *origin;
    if (f[14] == "train") {
      data.train.push_back(std::move(r));
    } else if (f[14] == "test") {
      data.test.push_back(std::move(r));
    } else {
      reader.Error("unknown split '" + f[14] + "'");
    }
  }
  return data;
}

}  // namespace densd
