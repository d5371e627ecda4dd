#include "softwrap/hard_trees.hpp"

#include <algorithm>
#include <cmath>

#include "train_common.hpp"

namespace softwrap {

double entropy(double weight_a, double weight_b) {
  if (weight_a < 0 || weight_b < 0)
    throw Error(ErrorKind::BadArguments, "class weights must be nonnegative");
  double total = weight_a + weight_b;
  if (!(total > 0)) throw Error(ErrorKind::ZeroWeight, "total class weight must be > 0");
  double h = 0.0;
  for (double w : {weight_a, weight_b}) {
    if (w > 0) {
      double p = w / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

double info_gain(const std::pair<double, double>& parent,
                 const std::vector<std::pair<double, double>>& children) {
  double sum_a = 0, sum_b = 0;
  for (const auto& [a, b] : children) {
    sum_a += a;
    sum_b += b;
  }
  if (std::fabs(sum_a - parent.first) > 1e-9 || std::fabs(sum_b - parent.second) > 1e-9)
    throw Error(ErrorKind::InconsistentWeights, "children do not sum to parent weights");
  double parent_total = parent.first + parent.second;
  double g = entropy(parent.first, parent.second);
  for (const auto& [a, b] : children) {
    double w = a + b;
    if (w > 0) g -= (w / parent_total) * entropy(a, b);
  }
  return g;
}

namespace detail {

std::optional<HardSplit> best_hard_split(const EncodedDataset& ds, const NodeData& nd,
                                         const std::vector<int>& features,
                                         double min_leaf_weight) {
  const double total = nd.total();
  const double parent_h = entropy(nd.weight_correct, nd.weight_incorrect);
  HardSplit best;

  struct Entry {
    double x;
    uint32_t row;
    double w;
    bool y;
  };
  std::vector<Entry> entries;
  entries.reserve(nd.rows.size());

  for (int f : features) {
    entries.clear();
    for (std::size_t i = 0; i < nd.rows.size(); ++i) {
      uint32_t r = nd.rows[i];
      entries.push_back({ds.at(r, static_cast<std::size_t>(f)), r, nd.weights[i],
                         ds.labels[r] != 0});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.x < b.x || (a.x == b.x && a.row < b.row);
    });

    double left_c = 0, left_i = 0;
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
      if (entries[i].y)
        left_i += entries[i].w;
      else
        left_c += entries[i].w;
      if (entries[i].x == entries[i + 1].x) continue;  // boundary only between distinct values

      double right_c = nd.weight_correct - left_c;
      double right_i = nd.weight_incorrect - left_i;
      if (right_c < 0) right_c = 0;  // guard accumulated rounding
      if (right_i < 0) right_i = 0;
      double wl = left_c + left_i;
      double wr = right_c + right_i;
      if (wl < min_leaf_weight || wr < min_leaf_weight) continue;
      double gain = parent_h - (wl / total) * entropy(left_c, left_i) -
                    (wr / total) * entropy(right_c, right_i);
      if (gain > best.gain) {
        best.feature = f;
        best.threshold = (entries[i].x + entries[i + 1].x) / 2.0;
        best.gain = gain;
      }
    }
  }
  if (best.feature < 0) return std::nullopt;
  return best;
}

namespace {

struct HardTreeBuilder {
  const EncodedDataset& ds;
  const TreeHyperparams& hp;
  int subset_k;     // number of features considered per node
  SplitMix64* rng;  // nullptr when all features are used
  Tree tree;

  int build(NodeData nd, int depth) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::optional<HardSplit> split;
    if (depth < hp.max_depth && !nd.pure() && nd.total() >= 2 * hp.min_leaf_weight) {
      std::vector<int> features;
      if (rng && subset_k < static_cast<int>(ds.cols())) {
        features = draw_feature_subset(ds.cols(), subset_k, *rng);
      } else {
        features.resize(ds.cols());
        for (std::size_t i = 0; i < ds.cols(); ++i) features[i] = static_cast<int>(i);
      }
      split = best_hard_split(ds, nd, features, hp.min_leaf_weight);
      if (split && split->gain < hp.min_gain) split.reset();
    }

    if (!split) {
      tree.nodes[static_cast<std::size_t>(id)].kind = NodeKind::Leaf;
      tree.nodes[static_cast<std::size_t>(id)].leaf = make_leaf_stats(nd);
      return id;
    }

    NodeData left, right;
    for (std::size_t i = 0; i < nd.rows.size(); ++i) {
      uint32_t r = nd.rows[i];
      NodeData& side =
          ds.at(r, static_cast<std::size_t>(split->feature)) <= split->threshold ? left : right;
      side.rows.push_back(r);
      side.weights.push_back(nd.weights[i]);
    }
    left.tally(ds);
    right.tally(ds);
    nd = NodeData{};  // release before recursing

    int left_id = build(std::move(left), depth + 1);
    int right_id = build(std::move(right), depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.kind = NodeKind::Split;
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.child = {left_id, right_id, -1};
    return id;
  }
};

Tree build_hard_tree(const EncodedDataset& ds, const TreeHyperparams& hp, NodeData root,
                     SplitMix64* rng, int subset_k) {
  HardTreeBuilder builder{ds, hp, subset_k, rng, {}};
  builder.tree.root = builder.build(std::move(root), 0);
  return std::move(builder.tree);
}

}  // namespace

QualityImpactModel train_ensemble(
    const EncodedDataset& ds, const TreeHyperparams& hp, uint64_t seed, Approach approach,
    const std::function<Tree(const EncodedDataset&, const TreeHyperparams&, NodeData,
                             SplitMix64&)>& build) {
  hp.validate();
  if (ds.rows == 0) throw Error(ErrorKind::InsufficientData, "empty dataset");
  if (static_cast<double>(ds.rows) < 2 * hp.min_leaf_weight)
    throw Error(ErrorKind::InsufficientData,
                "need total weight >= 2 * min_leaf_weight = " + format_double(2 * hp.min_leaf_weight));

  QualityImpactModel model;
  model.approach = approach;
  model.schema = ds.schema;
  model.columns = ds.columns;
  model.hp = hp;
  model.trees.resize(static_cast<std::size_t>(hp.n_trees));
  model.member_seeds.resize(static_cast<std::size_t>(hp.n_trees));
  for (int i = 0; i < hp.n_trees; ++i)
    model.member_seeds[static_cast<std::size_t>(i)] = derive_seed(seed, static_cast<uint64_t>(i));

  parallel_for(static_cast<std::size_t>(hp.n_trees), [&](std::size_t i) {
    SplitMix64 rng(model.member_seeds[i]);
    NodeData root = hp.bootstrap ? bootstrap_root(ds, rng) : full_root(ds, nullptr);
    model.trees[i] = build(ds, hp, std::move(root), rng);
  });
  return model;
}

}  // namespace detail

QualityImpactModel train_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                            const std::vector<double>* weights) {
  hp.validate();
  detail::NodeData root = detail::full_root(ds, weights);
  if (root.total() < 2 * hp.min_leaf_weight)
    throw Error(ErrorKind::InsufficientData,
                "need total weight >= 2 * min_leaf_weight = " + format_double(2 * hp.min_leaf_weight));
  QualityImpactModel model;
  model.approach = Approach::Dt;
  model.schema = ds.schema;
  model.columns = ds.columns;
  model.hp = hp;
  model.trees.push_back(detail::build_hard_tree(ds, hp, std::move(root), nullptr, 0));
  return model;
}

QualityImpactModel train_rf(const EncodedDataset& ds, const TreeHyperparams& hp, uint64_t seed) {
  int subset_k = detail::resolve_feature_subset(hp, ds.cols());
  return detail::train_ensemble(
      ds, hp, seed, Approach::Rf,
      [subset_k](const EncodedDataset& d, const TreeHyperparams& h, detail::NodeData root,
                 SplitMix64& rng) {
        return detail::build_hard_tree(d, h, std::move(root), &rng, subset_k);
      });
}

}  // namespace softwrap
