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

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "densd/boosting.hpp"
#include "densd/error.hpp"

namespace densd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json NodeToJson(const TreeNode& n) {
  if (n.is_leaf()) return {{"value", n.value}, {"count", n.count}};
  return {{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
          {"right", n.right},     {"gain", n.gain},           {"count", n.count}};
}

[[noreturn]] void Malformed(const std::string& what) {
  Fail(ErrorCode::kParse, "malformed model file: " + what);
}

const json& Field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) Malformed(std::string("missing '") + key + "'");
  return obj.at(key);
}

double Number(const json& v, const char* what) {
  if (!v.is_number()) Malformed(std::string(what) + " is not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) Malformed(std::string(what) + " is not finite");
  return d;
}

int Integer(const json& v, const char* what) {
  if (!v.is_number_integer()) Malformed(std::string(what) + " is not an integer");
  return v.get<int>();
}

std::vector<double> Numbers(const json& v, const char* what) {
  if (!v.is_array()) Malformed(std::string(what) + " is not an array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(Number(e, what));
  return out;
}

Tree TreeFromJson(const json& arr, std::size_t num_features) {
  if (!arr.is_array() || arr.empty()) Malformed("tree is not a non-empty node array");
  Tree tree;
  const int size = static_cast<int>(arr.size());
  for (int i = 0; i < size; ++i) {
    const json& j = arr[static_cast<std::size_t>(i)];
    TreeNode n;
    if (!j.is_object()) Malformed("tree node is not an object");
    if (!j.contains("count") || !j.at("count").is_number_unsigned()) Malformed("node count");
    n.count = j.at("count").get<std::uint64_t>();
    if (j.contains("value")) {
      n.value = Number(j.at("value"), "leaf value");
    } else {
      n.feature = Integer(Field(j, "feature"), "feature");
      n.threshold = Number(Field(j, "threshold"), "threshold");
      n.left = Integer(Field(j, "left"), "left");
      n.right = Integer(Field(j, "right"), "right");
      n.gain = Number(Field(j, "gain"), "gain");
      // Preorder storage: children always follow their parent.
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= num_features) {
        Malformed("split feature index out of range");
      }
      if (n.left <= i || n.right <= i || n.left >= size || n.right >= size) {
        Malformed("child index out of range");
      }
    }
    tree.nodes.push_back(n);
  }
  return tree;
}

}  // namespace

std::string ModelToJson(const GbmModel& model) {
  json trees = json::array();
  for (const auto& round : model.trees) {
    json per_class = json::array();
    for (const auto& tree : round) {
      json nodes = json::array();
      for (const auto& node : tree.nodes) {
        const double values[] = {node.threshold, node.value, node.gain};
        for (const double v : values) {
          Require(std::isfinite(v), ErrorCode::kInternal, "model contains a non-finite value");
        }
        nodes.push_back(NodeToJson(node));
      }
      per_class.push_back(std::move(nodes));
    }
    trees.push_back(std::move(per_class));
  }
  json classes = json::array();
  for (int c = 0; c < model.num_classes; ++c) classes.push_back(c);

  json doc = {
      {"version", std::string(kModelFormatVersion)},
      {"feature_names", model.feature_names},
      {"classes", classes},
      {"init_scores", model.init_scores},
      {"params",
       {{"n_estimators", model.params.n_estimators},
        {"learning_rate", model.params.learning_rate},
        {"max_depth", model.params.max_depth},
        {"min_samples_split", model.params.min_samples_split},
        {"leaf_epsilon", model.params.leaf_epsilon}}},
      {"scaler", {{"means", model.scaler.means}, {"stds", model.scaler.stds}}},
      {"trees", std::move(trees)},
      {"importances", model.importances},
      {"feature_options",
       {{"edge_threshold", model.feature_options.edge_threshold},
        {"lbp_mode", std::string(LbpModeName(model.feature_options.lbp_mode))}}},
  };
  return doc.dump(1) + "\n";
}

GbmModel ModelFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) Malformed("top level is not an object");
  const json& version = Field(doc, "version");
  if (!version.is_string()) Malformed("version is not a string");
  if (version.get<std::string>() != kModelFormatVersion) {
    Fail(ErrorCode::kIncompatibleModel, "model format version '" + version.get<std::string>() +
                                            "' is not supported (expected '" +
                                            std::string(kModelFormatVersion) + "')");
  }

  GbmModel m;
  const json& names = Field(doc, "feature_names");
  if (!names.is_array() || names.empty()) Malformed("feature_names");
  for (const auto& n : names) {
    if (!n.is_string()) Malformed("feature name is not a string");
    m.feature_names.push_back(n.get<std::string>());
  }
  const std::size_t nf = m.feature_names.size();

  const json& classes = Field(doc, "classes");
  if (!classes.is_array() || classes.size() < 2) Malformed("classes");
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (Integer(classes[c], "class") != static_cast<int>(c)) Malformed("classes must be 0..K-1");
  }
  m.num_classes = static_cast<int>(classes.size());
  const auto k = classes.size();

  m.init_scores = Numbers(Field(doc, "init_scores"), "init_scores");
  if (m.init_scores.size() != k) Malformed("init_scores length");

  const json& params = Field(doc, "params");
  m.params.n_estimators = Integer(Field(params, "n_estimators"), "n_estimators");
  m.params.learning_rate = Number(Field(params, "learning_rate"), "learning_rate");
  m.params.max_depth = Integer(Field(params, "max_depth"), "max_depth");
  m.params.min_samples_split = Integer(Field(params, "min_samples_split"), "min_samples_split");
  m.params.leaf_epsilon = Number(Field(params, "leaf_epsilon"), "leaf_epsilon");
  try {
    m.params.Validate();
  } catch (const Error& e) {
    Malformed(e.what());
  }

  const json& scaler = Field(doc, "scaler");
  m.scaler.means = Numbers(Field(scaler, "means"), "scaler means");
  m.scaler.stds = Numbers(Field(scaler, "stds"), "scaler stds");
  if (m.scaler.means.size() != nf || m.scaler.stds.size() != nf) Malformed("scaler dimension");
  for (const double s : m.scaler.stds) {
    if (s < 0.0) Malformed("negative scaler std");
  }

  const json& trees = Field(doc, "trees");
  if (!trees.is_array() || trees.size() != static_cast<std::size_t>(m.params.n_estimators)) {
    Malformed("trees must hold n_estimators rounds");
  }
  for (const auto& round : trees) {
    if (!round.is_array() || round.size() != k) Malformed("each round must hold one tree per class");
    std::vector<Tree> per_class;
    for (const auto& t : round) per_class.push_back(TreeFromJson(t, nf));
    m.trees.push_back(std::move(per_class));
  }

  m.importances = Numbers(Field(doc, "importances"), "importances");
  if (m.importances.size() != nf) Malformed("importances length");

  if (doc.contains("feature_options")) {
    const json& fo = doc.at("feature_options");
    m.feature_options.edge_threshold = Number(Field(fo, "edge_threshold"), "edge_threshold");
    const json& mode = Field(fo, "lbp_mode");
    const auto parsed = mode.is_string() ? ParseLbpMode(mode.get<std::string>()) : std::nullopt;
    if (!parsed) Malformed("lbp_mode");
    m.feature_options.lbp_mode = *parsed;
  }
  return m;
}

void SaveModel(const GbmModel& model, const fs::path& path) {
  const std::string text = ModelToJson(model);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

GbmModel LoadModel(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ModelFromJson(buf.str());
}

}  // namespace densd
