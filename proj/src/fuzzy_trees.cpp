#include "softwrap/fuzzy_trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "train_common.hpp"

namespace softwrap {

namespace {

constexpr double kWeightFloor = 1e-9;  // child point weights below this are dropped

double child_entropy_term(double wc, double wi, double node_total) {
  double w = wc + wi;
  if (w <= 0) return 0.0;
  return (w / node_total) * fuzzy_entropy(wc, wi);
}

}  // namespace

Membership membership(const FuzzyPartition& p, double x) {
  return fuzzy_membership(p.a, p.b, p.c, x);
}

double fuzzy_entropy(double weight_a, double weight_b) { return entropy(weight_a, weight_b); }

std::optional<FuzzySplitCandidate> find_fuzzy_partition(std::span<const double> values,
                                                        std::span<const double> point_weights,
                                                        std::span<const uint8_t> labels,
                                                        int n_bins, double min_gain,
                                                        double min_child_weight) {
  if (values.size() != point_weights.size() || values.size() != labels.size())
    throw Error(ErrorKind::LengthMismatch, "values/weights/labels sizes differ");
  if (n_bins < 2) throw Error(ErrorKind::BadArguments, "n_bins must be >= 2");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double node_c = 0, node_i = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(point_weights[k] > 0)) continue;
    lo = std::min(lo, values[k]);
    hi = std::max(hi, values[k]);
    if (labels[k])
      node_i += point_weights[k];
    else
      node_c += point_weights[k];
  }
  double node_total = node_c + node_i;
  if (!(node_total > 0) || !(hi > lo)) return std::nullopt;

  const double node_h = fuzzy_entropy(node_c, node_i);
  const double width = (hi - lo) / n_bins;

  FuzzySplitCandidate best;
  bool found = false;
  for (int bin = 0; bin < n_bins; ++bin) {
    double b = lo + (bin + 0.5) * width;
    if (b <= lo || b >= hi) continue;
    FuzzyPartition part{lo, b, hi};
    double sums[3][2] = {{0, 0}, {0, 0}, {0, 0}};  // [child][class]
    for (std::size_t k = 0; k < values.size(); ++k) {
      double w = point_weights[k];
      if (!(w > 0)) continue;
      Membership mu = membership(part, values[k]);
      int cls = labels[k] ? 1 : 0;
      sums[0][cls] += w * mu.left;
      sums[1][cls] += w * mu.mid;
      sums[2][cls] += w * mu.right;
    }
    if (min_child_weight > 0) {
      bool ok = true;
      for (auto& s : sums)
        if (s[0] + s[1] < min_child_weight) ok = false;
      if (!ok) continue;
    }
    double gain = node_h;
    for (auto& s : sums) gain -= child_entropy_term(s[0], s[1], node_total);
    if (!found || gain > best.gain) {
      best.partition = part;
      best.gain = gain;
      found = true;
    }
  }
  if (!found || best.gain < min_gain) return std::nullopt;
  return best;
}

namespace {

using detail::NodeData;

struct FuzzyTreeBuilder {
  const EncodedDataset& ds;
  const TreeHyperparams& hp;
  int subset_k;
  SplitMix64* rng;
  Tree tree;

  // scratch buffers for find_fuzzy_partition
  std::vector<double> vals, wts;
  std::vector<uint8_t> labs;

  struct Choice {
    int feature = -1;
    bool crisp = false;
    FuzzyPartition partition;
    double gain = -1.0;
  };

  std::optional<Choice> best_split(const NodeData& nd) {
    std::vector<int> features;
    if (rng && subset_k < static_cast<int>(ds.cols())) {
      features = detail::draw_feature_subset(ds.cols(), subset_k, *rng);
    } else {
      features.resize(ds.cols());
      for (std::size_t i = 0; i < ds.cols(); ++i) features[i] = static_cast<int>(i);
    }

    const double total = nd.total();
    const double parent_h = fuzzy_entropy(nd.weight_correct, nd.weight_incorrect);
    Choice best;
    for (int f : features) {
      const auto fi = static_cast<std::size_t>(f);
      if (ds.columns[fi].onehot) {
        double zero_c = 0, zero_i = 0;
        for (std::size_t i = 0; i < nd.rows.size(); ++i) {
          if (ds.at(nd.rows[i], fi) <= 0.5) {
            if (ds.labels[nd.rows[i]])
              zero_i += nd.weights[i];
            else
              zero_c += nd.weights[i];
          }
        }
        double one_c = std::max(0.0, nd.weight_correct - zero_c);
        double one_i = std::max(0.0, nd.weight_incorrect - zero_i);
        double wz = zero_c + zero_i, wo = one_c + one_i;
        if (wz < hp.min_leaf_weight || wo < hp.min_leaf_weight) continue;
        double gain = parent_h - child_entropy_term(zero_c, zero_i, total) -
                      child_entropy_term(one_c, one_i, total);
        if (gain > best.gain) best = {f, true, {}, gain};
      } else {
        vals.clear();
        wts.clear();
        labs.clear();
        for (std::size_t i = 0; i < nd.rows.size(); ++i) {
          vals.push_back(ds.at(nd.rows[i], fi));
          wts.push_back(nd.weights[i]);
          labs.push_back(ds.labels[nd.rows[i]]);
        }
        auto cand = find_fuzzy_partition(vals, wts, labs, hp.n_bins, 0.0, hp.min_leaf_weight);
        if (cand && cand->gain > best.gain) best = {f, false, cand->partition, cand->gain};
      }
    }
    if (best.feature < 0) return std::nullopt;
    return best;
  }

  int build(NodeData nd, int depth) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::optional<Choice> choice;
    if (depth < hp.max_depth && !nd.pure() && nd.total() >= 2 * hp.min_leaf_weight)
      choice = best_split(nd);
    if (choice && choice->gain < hp.min_gain) choice.reset();

    if (!choice) {
      tree.nodes[static_cast<std::size_t>(id)].kind = NodeKind::Leaf;
      tree.nodes[static_cast<std::size_t>(id)].leaf = detail::make_leaf_stats(nd);
      return id;
    }

    const auto fi = static_cast<std::size_t>(choice->feature);
    if (choice->crisp) {
      NodeData zero, one;
      for (std::size_t i = 0; i < nd.rows.size(); ++i) {
        NodeData& side = ds.at(nd.rows[i], fi) <= 0.5 ? zero : one;
        side.rows.push_back(nd.rows[i]);
        side.weights.push_back(nd.weights[i]);
      }
      zero.tally(ds);
      one.tally(ds);
      nd = NodeData{};
      int zero_id = build(std::move(zero), depth + 1);
      int one_id = build(std::move(one), depth + 1);
      TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
      node.kind = NodeKind::Split;
      node.feature = choice->feature;
      node.threshold = 0.5;
      node.child = {zero_id, one_id, -1};
    } else {
      NodeData kids[3];
      for (std::size_t i = 0; i < nd.rows.size(); ++i) {
        Membership mu = membership(choice->partition, ds.at(nd.rows[i], fi));
        double parts[3] = {mu.left, mu.mid, mu.right};
        for (int k = 0; k < 3; ++k) {
          double w = nd.weights[i] * parts[k];
          if (w < kWeightFloor) continue;
          kids[k].rows.push_back(nd.rows[i]);
          kids[k].weights.push_back(w);
        }
      }
      for (auto& kid : kids) kid.tally(ds);
      if (kids[0].total() <= 0 || kids[1].total() <= 0 || kids[2].total() <= 0) {
        // weight-floor pruning emptied a child (only possible with a tiny
        // min_leaf_weight); fall back to a leaf
        tree.nodes[static_cast<std::size_t>(id)].kind = NodeKind::Leaf;
        tree.nodes[static_cast<std::size_t>(id)].leaf = detail::make_leaf_stats(nd);
        return id;
      }
      nd = NodeData{};
      int left_id = build(std::move(kids[0]), depth + 1);
      int mid_id = build(std::move(kids[1]), depth + 1);
      int right_id = build(std::move(kids[2]), depth + 1);
      TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
      node.kind = NodeKind::FuzzySplit;
      node.feature = choice->feature;
      node.a = choice->partition.a;
      node.b = choice->partition.b;
      node.c = choice->partition.c;
      node.child = {left_id, mid_id, right_id};
    }
    return id;
  }
};

Tree build_fuzzy_tree(const EncodedDataset& ds, const TreeHyperparams& hp, NodeData root,
                      SplitMix64* rng, int subset_k) {
  FuzzyTreeBuilder builder{ds, hp, subset_k, rng, {}, {}, {}, {}};
  builder.tree.root = builder.build(std::move(root), 0);
  return std::move(builder.tree);
}

}  // namespace

QualityImpactModel train_fuzzy_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                                  uint64_t /*seed*/) {
  hp.validate();
  NodeData root = detail::full_root(ds, nullptr);
  if (root.total() < 2 * hp.min_leaf_weight)
    throw Error(ErrorKind::InsufficientData,
                "need total weight >= 2 * min_leaf_weight = " + format_double(2 * hp.min_leaf_weight));
  QualityImpactModel model;
  model.approach = Approach::FuzzyDt;
  model.schema = ds.schema;
  model.columns = ds.columns;
  model.hp = hp;
  model.trees.push_back(build_fuzzy_tree(ds, hp, std::move(root), nullptr, 0));
  return model;
}

QualityImpactModel train_fuzzy_rf(const EncodedDataset& ds, const TreeHyperparams& hp,
                                  uint64_t seed) {
  int subset_k = detail::resolve_feature_subset(hp, ds.cols());
  return detail::train_ensemble(
      ds, hp, seed, Approach::FuzzyRf,
      [subset_k](const EncodedDataset& d, const TreeHyperparams& h, NodeData root,
                 SplitMix64& rng) {
        return build_fuzzy_tree(d, h, std::move(root), &rng, subset_k);
      });
}

}  // namespace softwrap
