#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "softwrap/calibration.hpp"
#include "softwrap/csv.hpp"
#include "softwrap/encode.hpp"
#include "softwrap/fuzzy_trees.hpp"
#include "softwrap/hard_trees.hpp"
#include "softwrap/model_io.hpp"
#include "softwrap/soft_trees.hpp"
#include "softwrap/split.hpp"
#include "softwrap/synth.hpp"

using namespace softwrap;
using testutil::TempDir;

namespace {

FeatureSchema csv_schema() {
  FeatureSchema s;
  s.features = {{"distance", FeatureKind::Continuous, {}, "meters"},
                {"ped_type", FeatureKind::Categorical, {"adult", "child", "cyclist"}, ""}};
  return s;
}

}  // namespace

TEST_CASE("load_dataset parses rows and labels") {
  TempDir tmp;
  testutil::write_file(tmp.path("d.csv"),
                       "distance,ped_type,outcome_incorrect\n"
                       "1.5,adult,0\n"
                       "2.5,child,true\n");
  Dataset ds = load_dataset(tmp.path("d.csv"), csv_schema());
  REQUIRE(ds.size() == 2);
  CHECK(ds.points[0].values[0] == 1.5);
  CHECK(ds.points[0].values[1] == 0.0);
  CHECK_FALSE(*ds.points[0].outcome_incorrect);
  CHECK(ds.points[1].values[1] == 1.0);
  CHECK(*ds.points[1].outcome_incorrect);
}

TEST_CASE("load_dataset error cases") {
  TempDir tmp;
  FeatureSchema schema = csv_schema();

  testutil::write_file(tmp.path("missing.csv"), "distance,ped_type\n1.0,adult\n");
  CHECK_THROWS_WITH_AS(load_dataset(tmp.path("missing.csv"), schema),
                       doctest::Contains("outcome_incorrect"), Error);

  testutil::write_file(tmp.path("cat.csv"),
                       "distance,ped_type,outcome_incorrect\n1.0,truck,0\n");
  try {
    load_dataset(tmp.path("cat.csv"), schema);
    FAIL("expected UnknownCategory");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownCategory);
    CHECK(std::string(e.what()).find("ped_type") != std::string::npos);
    CHECK(std::string(e.what()).find("2") != std::string::npos);  // offending line
  }

  testutil::write_file(tmp.path("empty.csv"), "");
  try {
    load_dataset(tmp.path("empty.csv"), schema);
    FAIL("expected EmptyFile");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyFile);
  }

  testutil::write_file(tmp.path("bad.csv"), "distance,ped_type,outcome_incorrect\nxyz,adult,0\n");
  try {
    load_dataset(tmp.path("bad.csv"), schema);
    FAIL("expected UnparsableValue");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnparsableValue);
    CHECK(std::string(e.what()).find("distance") != std::string::npos);
  }
}

TEST_CASE("load_dataset captures sequence ids and ignores true_p") {
  TempDir tmp;
  testutil::write_file(tmp.path("d.csv"),
                       "distance,ped_type,sequence_id,outcome_incorrect,true_p\n"
                       "1.0,adult,s1,0,0.5\n"
                       "2.0,adult,s1,1,0.5\n"
                       "3.0,child,s2,0,0.25\n");
  Dataset ds = load_dataset(tmp.path("d.csv"), csv_schema());
  REQUIRE(ds.size() == 3);
  REQUIRE(ds.has_sequences());
  CHECK(ds.sequence_ids == std::vector<std::string>{"s1", "s1", "s2"});
}

TEST_CASE("csv round trip") {
  TempDir tmp;
  Dataset ds = generate({GenMode::Representative, 200, 42});
  save_dataset(ds, tmp.path("out.csv"));
  Dataset back = load_dataset(tmp.path("out.csv"), ds.schema);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.points[i].values == ds.points[i].values);
    CHECK(back.points[i].outcome_incorrect == ds.points[i].outcome_incorrect);
  }
}

TEST_CASE("schema json round trip") {
  TempDir tmp;
  FeatureSchema schema = scenario_schema();
  save_schema(schema, tmp.path("schema.json"));
  CHECK(load_schema(tmp.path("schema.json")) == schema);
}

TEST_CASE("one_hot_encode definition cases") {
  Dataset ds;
  ds.schema = csv_schema();
  for (int i = 0; i < 3; ++i) {
    DataPoint p;
    p.values = {static_cast<double>(i), static_cast<double>(i)};  // adult, child, cyclist
    p.outcome_incorrect = i == 2;
    ds.points.push_back(p);
  }
  EncodedDataset enc = one_hot_encode(ds);
  REQUIRE(enc.cols() == 4);  // 1 continuous + 3 one-hot
  REQUIRE(enc.rows == 3);
  CHECK(enc.columns[1].name == "ped_type=adult");
  // child row -> (0,1,0)
  CHECK(enc.at(1, 1) == 0.0);
  CHECK(enc.at(1, 2) == 1.0);
  CHECK(enc.at(1, 3) == 0.0);

  // dataset with no categoricals: matrix equals input values
  Dataset plain = testutil::one_feature_dataset({1.0, 2.0}, {0, 1});
  EncodedDataset enc2 = one_hot_encode(plain);
  CHECK(enc2.cols() == 1);
  CHECK(enc2.at(0, 0) == 1.0);
  CHECK(enc2.at(1, 0) == 2.0);
}

TEST_CASE("one-hot rows sum to exactly 1 per categorical block") {
  Dataset ds = generate({GenMode::Uniform, 500, 7});
  EncodedDataset enc = one_hot_encode(ds);
  for (std::size_t r = 0; r < enc.rows; ++r) {
    double sum = 0;
    for (std::size_t c = 0; c < enc.cols(); ++c)
      if (enc.columns[c].onehot) sum += enc.at(r, c);
    CHECK(sum == 1.0);
  }
}

TEST_CASE("split_dataset sizes, disjointness, determinism") {
  Dataset ds = testutil::one_feature_dataset({0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                                             {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  auto parts = split_dataset(ds, {0.5, 0.5}, 7);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].size() == 5);
  CHECK(parts[1].size() == 5);
  std::multiset<double> seen;
  for (const auto& part : parts)
    for (const auto& p : part.points) seen.insert(p.values[0]);
  std::multiset<double> want{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(seen == want);

  auto again = split_dataset(ds, {0.5, 0.5}, 7);
  for (int k = 0; k < 2; ++k) {
    REQUIRE(again[k].size() == parts[k].size());
    for (std::size_t i = 0; i < parts[k].points.size(); ++i)
      CHECK(again[k].points[i].values[0] == parts[k].points[i].values[0]);
  }

  auto three = split_dataset(ds, {0.3, 0.3, 0.4}, 1);
  CHECK(three[0].size() == 3);
  CHECK(three[1].size() == 3);
  CHECK(three[2].size() == 4);
}

TEST_CASE("split_dataset rejects bad fractions") {
  Dataset ds = testutil::one_feature_dataset({1, 2}, {0, 1});
  CHECK_THROWS_AS(split_dataset(ds, {0.7, 0.2, 0.2}, 0), Error);
  CHECK_THROWS_AS(split_dataset(ds, {0.5, -0.5, 1.0}, 0), Error);
  CHECK_THROWS_AS(split_dataset(ds, {}, 0), Error);
}

TEST_CASE("split_dataset keeps sequences together") {
  Dataset ds;
  ds.schema = testutil::one_feature_schema();
  for (int i = 0; i < 30; ++i) {
    DataPoint p;
    p.values = {static_cast<double>(i)};
    p.outcome_incorrect = i % 2 == 0;
    ds.points.push_back(p);
    ds.sequence_ids.push_back("seq" + std::to_string(i / 3));  // 10 sequences of 3
  }
  auto parts = split_dataset(ds, {0.5, 0.5}, 3);
  std::set<std::string> in_first(parts[0].sequence_ids.begin(), parts[0].sequence_ids.end());
  for (const std::string& sid : parts[1].sequence_ids) CHECK(in_first.count(sid) == 0);
  CHECK(parts[0].size() + parts[1].size() == 30);
}

namespace {

// every approach trained on a small synthetic dataset
std::vector<QualityImpactModel> small_models() {
  Dataset train = generate({GenMode::Uniform, 800, 21});
  EncodedDataset enc = one_hot_encode(train);
  TreeHyperparams hp;
  hp.min_leaf_weight = 20;
  hp.max_depth = 4;
  hp.n_trees = 3;
  std::vector<QualityImpactModel> models;
  models.push_back(train_dt(enc, hp));
  models.push_back(train_rf(enc, hp, 9));
  models.push_back(train_fuzzy_dt(enc, hp, 9));
  models.push_back(train_fuzzy_rf(enc, hp, 9));
  models.push_back(train_soft_dt(enc, hp, 9));
  models.push_back(train_bagged_soft_dt(enc, hp, 9));
  return models;
}

}  // namespace

TEST_CASE("save/load round trip preserves predictions for every approach") {
  TempDir tmp;
  Dataset cal = generate({GenMode::Representative, 400, 22});
  Dataset probe = generate({GenMode::Uniform, 100, 23});
  CalibrationConfig cfg;
  for (QualityImpactModel& m : small_models()) {
    QualityImpactModel calibrated = calibrate_model(m, cal, cfg);
    for (const QualityImpactModel* variant : {&m, &calibrated}) {
      auto path = tmp.path(std::string(approach_name(m.approach)) + ".json");
      save_model(*variant, path);
      QualityImpactModel loaded = load_model(path);
      for (const DataPoint& p : probe.points) {
        double before = predict_point_value(*variant, p);
        double after = predict_point_value(loaded, p);
        CHECK(std::fabs(before - after) <= 1e-12);
      }
    }
  }
}

TEST_CASE("trace reconstructs the estimate and weights sum to 1") {
  Dataset probe = generate({GenMode::Representative, 300, 31});
  for (const QualityImpactModel& m : small_models()) {
    for (const DataPoint& p : probe.points) {
      UncertaintyEstimate est = predict_point(m, p);
      double weight_sum = 0.0, reconstructed = 0.0;
      for (const TraceEntry& t : est.trace) {
        weight_sum += t.weight;
        reconstructed += t.weight * t.leaf_u;
        CHECK(t.weight > 0.0);
        CHECK_FALSE(t.conditions.empty());
      }
      CHECK(std::fabs(weight_sum - 1.0) <= 1e-9);
      CHECK(std::fabs(reconstructed - est.value) <= 1e-9);
      CHECK(est.value >= 0.0);
      CHECK(est.value <= 1.0);
    }
  }
}

TEST_CASE("load_model rejects corrupt and mismatched files") {
  TempDir tmp;
  Dataset train = generate({GenMode::Uniform, 300, 5});
  TreeHyperparams hp;
  hp.min_leaf_weight = 20;
  QualityImpactModel m = train_dt(one_hot_encode(train), hp);
  save_model(m, tmp.path("m.json"));

  std::string text = testutil::read_file(tmp.path("m.json"));
  testutil::write_file(tmp.path("trunc.json"), text.substr(0, text.size() / 2));
  try {
    load_model(tmp.path("trunc.json"));
    FAIL("expected CorruptModel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CorruptModel);
  }

  std::string versioned = text;
  auto pos = versioned.find("\"format_version\": \"1\"");
  REQUIRE(pos != std::string::npos);
  versioned.replace(pos, std::string("\"format_version\": \"1\"").size(),
                    "\"format_version\": \"99\"");
  testutil::write_file(tmp.path("v99.json"), versioned);
  try {
    load_model(tmp.path("v99.json"));
    FAIL("expected FormatVersionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FormatVersionMismatch);
  }
}

TEST_CASE("parse_point validates names, categories, completeness") {
  FeatureSchema schema = csv_schema();
  DataPoint p = parse_point(schema, {{"distance", "4.5"}, {"ped_type", "cyclist"}});
  CHECK(p.values == std::vector<double>{4.5, 2.0});
  CHECK_THROWS_AS(parse_point(schema, {{"distance", "4.5"}}), Error);
  CHECK_THROWS_AS(parse_point(schema, {{"distance", "4.5"}, {"ped_type", "truck"}}), Error);
  CHECK_THROWS_AS(parse_point(schema, {{"distance", "x"}, {"ped_type", "adult"}}), Error);
  CHECK_THROWS_AS(parse_point(schema, {{"bogus", "1"}, {"ped_type", "adult"}}), Error);
}
