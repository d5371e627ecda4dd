#include "softwrap/model_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "softwrap/csv.hpp"

namespace softwrap {

namespace {

using nlohmann::json;

json schema_to_json(const FeatureSchema& schema) {
  json j;
  j["features"] = json::array();
  for (const auto& f : schema.features) {
    json jf;
    jf["name"] = f.name;
    jf["kind"] = f.kind == FeatureKind::Continuous ? "continuous" : "categorical";
    if (f.kind == FeatureKind::Categorical) jf["categories"] = f.categories;
    if (!f.unit.empty()) jf["unit"] = f.unit;
    j["features"].push_back(std::move(jf));
  }
  j["label"] = schema.label_name;
  return j;
}

FeatureSchema schema_from_json(const json& j) {
  FeatureSchema schema;
  for (const auto& jf : j.at("features")) {
    FeatureSpec spec;
    spec.name = jf.at("name").get<std::string>();
    std::string kind = jf.at("kind").get<std::string>();
    if (kind == "continuous")
      spec.kind = FeatureKind::Continuous;
    else if (kind == "categorical")
      spec.kind = FeatureKind::Categorical;
    else
      throw Error(ErrorKind::CorruptModel, "unknown feature kind '" + kind + "'");
    if (jf.contains("categories"))
      spec.categories = jf["categories"].get<std::vector<std::string>>();
    if (jf.contains("unit")) spec.unit = jf["unit"].get<std::string>();
    schema.features.push_back(std::move(spec));
  }
  schema.label_name = j.at("label").get<std::string>();
  return schema;
}

json hyperparams_to_json(const TreeHyperparams& hp) {
  json j;
  j["max_depth"] = hp.max_depth;
  j["min_leaf_weight"] = hp.min_leaf_weight;
  j["min_gain"] = hp.min_gain;
  j["n_trees"] = hp.n_trees;
  j["feature_subset"] = hp.feature_subset;
  j["bootstrap"] = hp.bootstrap;
  j["n_bins"] = hp.n_bins;
  j["gd"] = {{"learning_rate", hp.gd.learning_rate},
             {"max_iters", hp.gd.max_iters},
             {"tol", hp.gd.tol},
             {"init_steepness", hp.gd.init_steepness}};
  return j;
}

TreeHyperparams hyperparams_from_json(const json& j) {
  TreeHyperparams hp;
  hp.max_depth = j.at("max_depth").get<int>();
  hp.min_leaf_weight = j.at("min_leaf_weight").get<double>();
  hp.min_gain = j.at("min_gain").get<double>();
  hp.n_trees = j.at("n_trees").get<int>();
  hp.feature_subset = j.at("feature_subset").get<int>();
  hp.bootstrap = j.at("bootstrap").get<bool>();
  hp.n_bins = j.at("n_bins").get<int>();
  const json& gd = j.at("gd");
  hp.gd.learning_rate = gd.at("learning_rate").get<double>();
  hp.gd.max_iters = gd.at("max_iters").get<int>();
  hp.gd.tol = gd.at("tol").get<double>();
  hp.gd.init_steepness = gd.at("init_steepness").get<double>();
  return hp;
}

json node_to_json(const TreeNode& n, int id) {
  json j;
  j["id"] = id;
  switch (n.kind) {
    case NodeKind::Leaf: {
      j["kind"] = "leaf";
      j["weight_correct"] = n.leaf.weight_correct;
      j["weight_incorrect"] = n.leaf.weight_incorrect;
      j["raw_u"] = n.leaf.raw_u;
      if (n.leaf.calibrated_u) j["calibrated_u"] = *n.leaf.calibrated_u;
      if (n.leaf.calibration_n) j["calibration_n"] = *n.leaf.calibration_n;
      break;
    }
    case NodeKind::Split:
      j["kind"] = "split";
      j["feature"] = n.feature;
      j["threshold"] = n.threshold;
      j["children"] = {n.child[0], n.child[1]};
      break;
    case NodeKind::FuzzySplit:
      j["kind"] = "fuzzy";
      j["feature"] = n.feature;
      j["anchors"] = {n.a, n.b, n.c};
      j["children"] = {n.child[0], n.child[1], n.child[2]};
      break;
    case NodeKind::Gate: {
      j["kind"] = "gate";
      j["feature"] = n.feature;
      j["slope"] = n.slope;
      j["offset"] = n.offset;
      double crossing = -n.offset / n.slope;
      double half_width = 2.0 / std::fabs(n.slope);
      j["crossing"] = crossing;
      j["window"] = {crossing - half_width, crossing, crossing + half_width};
      j["children"] = {n.child[0], n.child[1]};
      break;
    }
  }
  return j;
}

TreeNode node_from_json(const json& j) {
  TreeNode n;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    n.kind = NodeKind::Leaf;
    n.leaf.weight_correct = j.at("weight_correct").get<double>();
    n.leaf.weight_incorrect = j.at("weight_incorrect").get<double>();
    n.leaf.raw_u = j.at("raw_u").get<double>();
    if (j.contains("calibrated_u")) n.leaf.calibrated_u = j["calibrated_u"].get<double>();
    if (j.contains("calibration_n")) n.leaf.calibration_n = j["calibration_n"].get<double>();
    return n;
  }
  n.feature = j.at("feature").get<int>();
  const json& children = j.at("children");
  if (kind == "split") {
    n.kind = NodeKind::Split;
    n.threshold = j.at("threshold").get<double>();
    if (children.size() != 2) throw Error(ErrorKind::CorruptModel, "split needs 2 children");
    n.child = {children[0].get<int>(), children[1].get<int>(), -1};
  } else if (kind == "fuzzy") {
    n.kind = NodeKind::FuzzySplit;
    const json& anchors = j.at("anchors");
    if (anchors.size() != 3) throw Error(ErrorKind::CorruptModel, "fuzzy needs 3 anchors");
    n.a = anchors[0].get<double>();
    n.b = anchors[1].get<double>();
    n.c = anchors[2].get<double>();
    if (children.size() != 3) throw Error(ErrorKind::CorruptModel, "fuzzy needs 3 children");
    n.child = {children[0].get<int>(), children[1].get<int>(), children[2].get<int>()};
  } else if (kind == "gate") {
    n.kind = NodeKind::Gate;
    n.slope = j.at("slope").get<double>();
    n.offset = j.at("offset").get<double>();
    if (children.size() != 2) throw Error(ErrorKind::CorruptModel, "gate needs 2 children");
    n.child = {children[0].get<int>(), children[1].get<int>(), -1};
  } else {
    throw Error(ErrorKind::CorruptModel, "unknown node kind '" + kind + "'");
  }
  return n;
}

}  // namespace

std::string model_to_json(const QualityImpactModel& m) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["approach"] = approach_name(m.approach);
  j["schema"] = schema_to_json(m.schema);
  j["hyperparams"] = hyperparams_to_json(m.hp);
  j["calibrated"] = m.calibrated;
  if (m.calibrated) j["confidence_level"] = m.confidence_level;
  j["member_seeds"] = m.member_seeds;
  j["trees"] = json::array();
  for (const Tree& tree : m.trees) {
    json jt;
    jt["root"] = tree.root;
    jt["nodes"] = json::array();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
      jt["nodes"].push_back(node_to_json(tree.nodes[i], static_cast<int>(i)));
    j["trees"].push_back(std::move(jt));
  }
  return j.dump(1) + "\n";
}

QualityImpactModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptModel, e.what());
  }
  try {
    if (!j.contains("format_version"))
      throw Error(ErrorKind::CorruptModel, "missing format_version");
    std::string version = j["format_version"].get<std::string>();
    if (version != kModelFormatVersion)
      throw Error(ErrorKind::FormatVersionMismatch,
                  "model format '" + version + "', expected '" + kModelFormatVersion + "'");

    QualityImpactModel m;
    m.approach = approach_from_name(j.at("approach").get<std::string>());
    m.schema = schema_from_json(j.at("schema"));
    m.columns = encoding_for(m.schema);
    m.hp = hyperparams_from_json(j.at("hyperparams"));
    m.calibrated = j.at("calibrated").get<bool>();
    if (m.calibrated) m.confidence_level = j.at("confidence_level").get<double>();
    m.member_seeds = j.at("member_seeds").get<std::vector<uint64_t>>();
    for (const json& jt : j.at("trees")) {
      Tree tree;
      tree.root = jt.at("root").get<int>();
      for (const json& jn : jt.at("nodes")) tree.nodes.push_back(node_from_json(jn));
      m.trees.push_back(std::move(tree));
    }
    validate_model(m);
    return m;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::CorruptModel, e.what());
  }
}

void save_model(const QualityImpactModel& m, const std::filesystem::path& path) {
  atomic_write(path, model_to_json(m));
}

QualityImpactModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace softwrap
