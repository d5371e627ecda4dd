#include "softwrap/soft_trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "train_common.hpp"

namespace softwrap {

namespace {

constexpr double kProbEps = 1e-6;     // leaf-rate clamp, avoids log singularities
constexpr double kWeightFloor = 1e-9; // child point weights below this are dropped

void check_leaf_probs(double p_left, double p_right) {
  for (double p : {p_left, p_right}) {
    if (!(p >= kProbEps && p <= 1.0 - kProbEps))
      throw Error(ErrorKind::BadArguments, "leaf probabilities must lie in [1e-6, 1-1e-6]");
  }
}

double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

// Gate-weighted incorrect rates of the two children, clamped.
// Falls back to the node rate if a side receives (numerically) no weight.
void leaf_rates(std::span<const GatePoint> points, std::span<const double> g, double& p_left,
                double& p_right) {
  double wl = 0, wl_over = 0, wr = 0, wr_over = 0, w_all = 0, w_over = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double w = points[i].w;
    double right = w * g[i];
    double left = w - right;
    wl += left;
    wr += right;
    w_all += w;
    if (points[i].y != 0.0) {
      wl_over += left * points[i].y;
      wr_over += right * points[i].y;
      w_over += w * points[i].y;
    }
  }
  double node_rate = w_all > 0 ? w_over / w_all : 0.5;
  p_left = clamp_prob(wl > 0 ? wl_over / wl : node_rate);
  p_right = clamp_prob(wr > 0 ? wr_over / wr : node_rate);
}

double mixture_loss(std::span<const GatePoint> points, std::span<const double> g, double p_left,
                    double p_right) {
  double loss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double p = (1.0 - g[i]) * p_left + g[i] * p_right;
    loss -= points[i].w * (points[i].y * std::log(p) + (1.0 - points[i].y) * std::log(1.0 - p));
  }
  return loss;
}

void fill_gate(std::span<const GatePoint> points, double slope, double offset,
               std::vector<double>& g) {
  g.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) g[i] = sigmoid(slope * points[i].x + offset);
}

LossGrad loss_grad_cached(std::span<const GatePoint> points, std::span<const double> g,
                          double p_left, double p_right) {
  LossGrad out;
  const double delta = p_right - p_left;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GatePoint& pt = points[i];
    double p = (1.0 - g[i]) * p_left + g[i] * p_right;
    out.loss -= pt.w * (pt.y * std::log(p) + (1.0 - pt.y) * std::log(1.0 - p));
    double common = pt.w * (p - pt.y) / (p * (1.0 - p)) * delta * g[i] * (1.0 - g[i]);
    out.d_slope += common * pt.x;
    out.d_offset += common;
  }
  return out;
}

}  // namespace

LossGrad node_loss_and_gradient(double slope, double offset, std::span<const GatePoint> points,
                                double p_left, double p_right) {
  check_leaf_probs(p_left, p_right);
  double total_w = 0;
  for (const GatePoint& pt : points) total_w += pt.w;
  if (!(total_w > 0)) throw Error(ErrorKind::ZeroWeight, "total point weight must be > 0");
  if (std::fabs(p_right - p_left) < 1e-12)
    throw Error(ErrorKind::DegenerateLeaves, "p_left == p_right: gradient is identically zero");
  std::vector<double> g;
  fill_gate(points, slope, offset, g);
  return loss_grad_cached(points, g, p_left, p_right);
}

SoftGate fit_gate(std::span<const GatePoint> points, double hard_threshold, const GdParams& gd,
                  std::vector<double>* loss_history) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const GatePoint& pt : points) {
    lo = std::min(lo, pt.x);
    hi = std::max(hi, pt.x);
  }
  if (!(hard_threshold > lo && hard_threshold < hi))
    throw Error(ErrorKind::BadArguments, "hard threshold must lie strictly inside the value range");

  double slope = gd.init_steepness > 0 ? gd.init_steepness : 4.0 / (hi - lo);
  double offset = -slope * hard_threshold;
  SoftGate gate{-1, slope, offset};
  if (gd.max_iters == 0) return gate;

  std::vector<double> g, g_next;
  fill_gate(points, gate.slope, gate.offset, g);
  double p_left, p_right;
  leaf_rates(points, g, p_left, p_right);
  double loss = mixture_loss(points, g, p_left, p_right);
  if (loss_history) loss_history->push_back(loss);

  for (int iter = 0; iter < gd.max_iters; ++iter) {
    if (std::fabs(p_right - p_left) < 1e-12) {
      if (iter == 0)
        throw Error(ErrorKind::DegenerateLeaves, "p_left == p_right at initialization");
      break;  // stationary: gradient identically zero
    }
    LossGrad lg = loss_grad_cached(points, g, p_left, p_right);
    double norm = std::sqrt(lg.d_slope * lg.d_slope + lg.d_offset * lg.d_offset);
    double step = gd.learning_rate / (1.0 + norm);

    double next_slope = 0, next_offset = 0, next_p_left = 0, next_p_right = 0, next_loss = 0;
    bool improved = false;
    for (int tries = 0; tries < 40; ++tries) {
      next_slope = gate.slope - step * lg.d_slope;
      next_offset = gate.offset - step * lg.d_offset;
      fill_gate(points, next_slope, next_offset, g_next);
      leaf_rates(points, g_next, next_p_left, next_p_right);
      next_loss = mixture_loss(points, g_next, next_p_left, next_p_right);
      if (next_loss <= loss) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;

    gate.slope = next_slope;
    gate.offset = next_offset;
    g.swap(g_next);
    p_left = next_p_left;
    p_right = next_p_right;
    double delta_loss = loss - next_loss;
    loss = next_loss;
    if (loss_history) loss_history->push_back(loss);
    if (delta_loss < gd.tol) break;
  }
  return gate;
}

SoftGate fit_gate(std::span<const GatePoint> points, double hard_threshold, const GdParams& gd) {
  return fit_gate(points, hard_threshold, gd, nullptr);
}

namespace {

using detail::NodeData;

struct SoftTreeBuilder {
  const EncodedDataset& ds;
  const TreeHyperparams& hp;
  Tree tree;
  std::vector<int> all_features;
  std::vector<GatePoint> scratch;

  int leaf(int id, const NodeData& nd) {
    tree.nodes[static_cast<std::size_t>(id)].kind = NodeKind::Leaf;
    tree.nodes[static_cast<std::size_t>(id)].leaf = detail::make_leaf_stats(nd);
    return id;
  }

  int build(NodeData nd, int depth) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (depth >= hp.max_depth || nd.pure() || nd.total() < 2 * hp.min_leaf_weight)
      return leaf(id, nd);
    auto split = detail::best_hard_split(ds, nd, all_features, hp.min_leaf_weight);
    if (!split || split->gain < hp.min_gain) return leaf(id, nd);

    const auto fi = static_cast<std::size_t>(split->feature);
    scratch.clear();
    for (std::size_t i = 0; i < nd.rows.size(); ++i) {
      scratch.push_back(
          {ds.at(nd.rows[i], fi), nd.weights[i], ds.labels[nd.rows[i]] ? 1.0 : 0.0});
    }
    SoftGate gate;
    try {
      gate = fit_gate(scratch, split->threshold, hp.gd);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateLeaves) return leaf(id, nd);
      throw;
    }
    gate.feature_index = split->feature;

    NodeData left, right;
    for (std::size_t i = 0; i < nd.rows.size(); ++i) {
      double g = gate(ds.at(nd.rows[i], fi));
      double wr = nd.weights[i] * g;
      double wl = nd.weights[i] - wr;
      if (wl >= kWeightFloor) {
        left.rows.push_back(nd.rows[i]);
        left.weights.push_back(wl);
      }
      if (wr >= kWeightFloor) {
        right.rows.push_back(nd.rows[i]);
        right.weights.push_back(wr);
      }
    }
    left.tally(ds);
    right.tally(ds);
    if (left.total() < hp.min_leaf_weight || right.total() < hp.min_leaf_weight)
      return leaf(id, nd);

    nd = NodeData{};
    int left_id = build(std::move(left), depth + 1);
    int right_id = build(std::move(right), depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.kind = NodeKind::Gate;
    node.feature = gate.feature_index;
    node.slope = gate.slope;
    node.offset = gate.offset;
    node.child = {left_id, right_id, -1};
    return id;
  }
};

Tree build_soft_tree(const EncodedDataset& ds, const TreeHyperparams& hp, NodeData root) {
  SoftTreeBuilder builder{ds, hp, {}, {}, {}};
  builder.all_features.resize(ds.cols());
  for (std::size_t i = 0; i < ds.cols(); ++i) builder.all_features[i] = static_cast<int>(i);
  builder.tree.root = builder.build(std::move(root), 0);
  return std::move(builder.tree);
}

}  // namespace

QualityImpactModel train_soft_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                                 uint64_t /*seed*/) {
  hp.validate();
  NodeData root = detail::full_root(ds, nullptr);
  if (root.total() < 2 * hp.min_leaf_weight)
    throw Error(ErrorKind::InsufficientData,
                "need total weight >= 2 * min_leaf_weight = " + format_double(2 * hp.min_leaf_weight));
  QualityImpactModel model;
  model.approach = Approach::SoftDt;
  model.schema = ds.schema;
  model.columns = ds.columns;
  model.hp = hp;
  model.trees.push_back(build_soft_tree(ds, hp, std::move(root)));
  return model;
}

QualityImpactModel train_bagged_soft_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                                        uint64_t seed) {
  return detail::train_ensemble(
      ds, hp, seed, Approach::BaggedSoftDt,
      [](const EncodedDataset& d, const TreeHyperparams& h, NodeData root, SplitMix64&) {
        return build_soft_tree(d, h, std::move(root));
      });
}

}  // namespace softwrap
