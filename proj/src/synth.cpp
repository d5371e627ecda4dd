#include "softwrap/synth.hpp"

#include <algorithm>
#include <cmath>

#include "softwrap/model.hpp"

namespace softwrap {

namespace {

constexpr double kIntercept = -3.1;
constexpr double kDistanceCoef = 0.12;
constexpr double kPrecipitationCoef = 0.010;
constexpr double kFogCoef = 0.015;
constexpr double kOcclusionCoef = 3.0;
constexpr double kTypeOffset[3] = {0.0, 0.6, 0.3};  // adult, child, cyclist

constexpr double kDistanceMax = 25.0;
constexpr double kPrecipitationMax = 100.0;
constexpr double kFogMax = 100.0;
constexpr double kOcclusionMax = 0.5;

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

}  // namespace

const FeatureSchema& scenario_schema() {
  static const FeatureSchema schema = [] {
    FeatureSchema s;
    s.features = {
        {"distance", FeatureKind::Continuous, {}, "meters"},
        {"precipitation", FeatureKind::Continuous, {}, "percent"},
        {"fog", FeatureKind::Continuous, {}, "percent"},
        {"occlusion", FeatureKind::Continuous, {}, "fraction"},
        {"ped_type", FeatureKind::Categorical, {"adult", "child", "cyclist"}, ""},
    };
    s.label_name = "outcome_incorrect";
    return s;
  }();
  return schema;
}

double true_probability(const FeatureSchema& schema, const DataPoint& x) {
  if (schema != scenario_schema())
    throw Error(ErrorKind::SchemaMismatch, "true_probability requires the scenario schema");
  if (x.values.size() != schema.features.size())
    throw Error(ErrorKind::SchemaMismatch, "point arity does not match the scenario schema");
  int ped = static_cast<int>(x.values[4]);
  if (ped < 0 || ped > 2) throw Error(ErrorKind::UnknownCategory, "ped_type index out of range");
  double z = kIntercept + kDistanceCoef * x.values[0] + kPrecipitationCoef * x.values[1] +
             kFogCoef * x.values[2] + kOcclusionCoef * x.values[3] + kTypeOffset[ped];
  return std::clamp(sigmoid(z), 0.01, 0.99);
}

Dataset generate(const GeneratorConfig& cfg, std::vector<double>* truth_out) {
  if (cfg.n < 1) throw Error(ErrorKind::BadConfig, "generator needs n >= 1");
  Dataset ds;
  ds.schema = scenario_schema();
  ds.points.resize(cfg.n);
  ds.provenance = std::string("synth:") +
                  (cfg.mode == GenMode::Uniform ? "uniform" : "representative") +
                  "/seed=" + std::to_string(cfg.seed) + "/n=" + std::to_string(cfg.n);
  if (truth_out) truth_out->resize(cfg.n);

  for (std::size_t i = 0; i < cfg.n; ++i) {
    SplitMix64 rng(derive_seed(cfg.seed, i));
    DataPoint p;
    p.values.resize(5);
    if (cfg.mode == GenMode::Uniform) {
      p.values[0] = rng.uniform01() * kDistanceMax;
      p.values[1] = rng.uniform01() * kPrecipitationMax;
      p.values[2] = rng.uniform01() * kFogMax;
      p.values[3] = rng.uniform01() * kOcclusionMax;
      p.values[4] = static_cast<double>(rng.below(3));
    } else {
      // distance ~ 25 * Beta(2,2): median of three uniforms
      p.values[0] = kDistanceMax * median3(rng.uniform01(), rng.uniform01(), rng.uniform01());
      // precipitation: 0 w.p. 0.7, else Exp(mean 20) capped at 100
      if (rng.uniform01() < 0.7)
        p.values[1] = 0.0;
      else
        p.values[1] = std::min(-20.0 * std::log(1.0 - rng.uniform01()), kPrecipitationMax);
      // fog: 0 w.p. 0.85, else Uniform(0, 60)
      p.values[2] = rng.uniform01() < 0.85 ? 0.0 : rng.uniform01() * 60.0;
      // occlusion ~ 0.5 * Beta(1,4): min of four uniforms
      p.values[3] = kOcclusionMax * std::min({rng.uniform01(), rng.uniform01(), rng.uniform01(),
                                              rng.uniform01()});
      // ped_type ~ (0.7, 0.15, 0.15)
      double r = rng.uniform01();
      p.values[4] = r < 0.7 ? 0.0 : (r < 0.85 ? 1.0 : 2.0);
    }
    double prob = true_probability(ds.schema, p);
    p.outcome_incorrect = rng.uniform01() < prob;
    if (truth_out) (*truth_out)[i] = prob;
    ds.points[i] = std::move(p);
  }
  return ds;
}

}  // namespace softwrap
