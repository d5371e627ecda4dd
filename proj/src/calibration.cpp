#include "softwrap/calibration.hpp"

#include <cmath>
#include <vector>

namespace softwrap {

namespace {

// Continued fraction for I_x(a,b), modified Lentz method.
double beta_cont_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw Error(ErrorKind::BadArguments, "beta parameters must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cont_fraction(a, b, x) / a;
  return 1.0 - front * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double cp_upper(double weighted_incorrect, double weighted_total, double confidence_level) {
  if (weighted_incorrect < 0 || weighted_total < 0 || weighted_incorrect > weighted_total ||
      !(confidence_level > 0.0 && confidence_level < 1.0))
    throw Error(ErrorKind::BadArguments, "cp_upper: need 0 <= k <= n and CL in (0,1)");
  if (weighted_total == 0.0) return 1.0;
  if (weighted_incorrect >= weighted_total) return 1.0;
  const double a = weighted_incorrect + 1.0;
  const double b = weighted_total - weighted_incorrect;
  if (b < 1e-12) return 1.0;  // k indistinguishable from n

  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(a, b, mid) >= confidence_level)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

QualityImpactModel calibrate_model(const QualityImpactModel& m, const Dataset& cal,
                                   const CalibrationConfig& cfg) {
  if (!(cfg.confidence_level > 0.0 && cfg.confidence_level < 1.0))
    throw Error(ErrorKind::BadArguments, "confidence level must lie in (0,1)");
  if (!(cfg.fallback_u >= 0.0 && cfg.fallback_u <= 1.0))
    throw Error(ErrorKind::BadArguments, "fallback_u must lie in [0,1]");
  if (cal.points.empty()) throw Error(ErrorKind::EmptyCalibrationSet, "calibration set is empty");
  if (cal.schema != m.schema)
    throw Error(ErrorKind::SchemaMismatch, "calibration data schema differs from model schema");

  // encode once
  std::vector<std::vector<double>> encoded;
  std::vector<uint8_t> labels;
  encoded.reserve(cal.points.size());
  labels.reserve(cal.points.size());
  for (const DataPoint& p : cal.points) {
    if (!p.outcome_incorrect.has_value())
      throw Error(ErrorKind::SchemaMismatch, "calibration point lacks a label");
    encoded.push_back(encode_point(m.schema, m.columns, p));
    labels.push_back(*p.outcome_incorrect ? 1 : 0);
  }

  QualityImpactModel out = m;
  parallel_for(out.trees.size(), [&](std::size_t t) {
    Tree& tree = out.trees[t];
    std::vector<double> weight(tree.nodes.size(), 0.0);
    std::vector<double> weight_incorrect(tree.nodes.size(), 0.0);
    for (std::size_t i = 0; i < encoded.size(); ++i) {
      visit_leaves(tree, encoded[i], [&](int node, double w) {
        weight[static_cast<std::size_t>(node)] += w;
        if (labels[i]) weight_incorrect[static_cast<std::size_t>(node)] += w;
      });
    }
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
      TreeNode& node = tree.nodes[n];
      if (node.kind != NodeKind::Leaf) continue;
      node.leaf.calibration_n = weight[n];
      node.leaf.calibrated_u = weight[n] > 0.0
                                   ? cp_upper(weight_incorrect[n], weight[n], cfg.confidence_level)
                                   : cfg.fallback_u;
    }
  });
  out.calibrated = true;
  out.confidence_level = cfg.confidence_level;
  return out;
}

}  // namespace softwrap
