#pragma once

// Internal training machinery shared by the hard, fuzzy, and soft tree
// trainers: weighted node data, bootstrap resampling, per-node feature
// subsets, and the generic ensemble driver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "softwrap/common.hpp"
#include "softwrap/encode.hpp"
#include "softwrap/hard_trees.hpp"
#include "softwrap/model.hpp"

namespace softwrap::detail {

// Points reaching a node, with their accumulated weights.
struct NodeData {
  std::vector<uint32_t> rows;
  std::vector<double> weights;

  double weight_correct = 0.0;
  double weight_incorrect = 0.0;

  double total() const { return weight_correct + weight_incorrect; }
  bool pure() const { return weight_correct == 0.0 || weight_incorrect == 0.0; }

  void tally(const EncodedDataset& ds) {
    weight_correct = weight_incorrect = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (ds.labels[rows[i]])
        weight_incorrect += weights[i];
      else
        weight_correct += weights[i];
    }
  }
};

inline NodeData full_root(const EncodedDataset& ds, const std::vector<double>* weights) {
  if (weights && weights->size() != ds.rows)
    throw Error(ErrorKind::LengthMismatch, "weights size != dataset rows");
  NodeData nd;
  nd.rows.reserve(ds.rows);
  nd.weights.reserve(ds.rows);
  for (std::size_t r = 0; r < ds.rows; ++r) {
    double w = weights ? (*weights)[r] : 1.0;
    if (w < 0) throw Error(ErrorKind::BadArguments, "negative point weight");
    if (w == 0) continue;
    nd.rows.push_back(static_cast<uint32_t>(r));
    nd.weights.push_back(w);
  }
  nd.tally(ds);
  return nd;
}

// N draws with replacement, returned as multiplicity weights.
inline NodeData bootstrap_root(const EncodedDataset& ds, SplitMix64& rng) {
  std::vector<uint32_t> counts(ds.rows, 0);
  for (std::size_t i = 0; i < ds.rows; ++i) ++counts[rng.below(ds.rows)];
  NodeData nd;
  for (std::size_t r = 0; r < ds.rows; ++r) {
    if (counts[r] == 0) continue;
    nd.rows.push_back(static_cast<uint32_t>(r));
    nd.weights.push_back(static_cast<double>(counts[r]));
  }
  nd.tally(ds);
  return nd;
}

// Uniform subset of k features out of d, sorted ascending so candidate
// evaluation order (and therefore tie-breaking) stays deterministic.
inline std::vector<int> draw_feature_subset(std::size_t d, int k, SplitMix64& rng) {
  std::vector<int> all(d);
  for (std::size_t i = 0; i < d; ++i) all[i] = static_cast<int>(i);
  for (int i = 0; i < k; ++i) {
    std::size_t j = static_cast<std::size_t>(i) + rng.below(d - static_cast<std::size_t>(i));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

inline int resolve_feature_subset(const TreeHyperparams& hp, std::size_t d) {
  int k = hp.feature_subset;
  if (k == 0) k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  return std::min<int>(k, static_cast<int>(d));
}

struct HardSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

// Exhaustive scan over (feature, midpoint threshold) candidates; candidates
// whose children would fall below min_leaf_weight are skipped. Tie-break:
// lowest feature index, then lowest threshold (strict > while scanning
// ascending candidates).
std::optional<HardSplit> best_hard_split(const EncodedDataset& ds, const NodeData& nd,
                                         const std::vector<int>& features,
                                         double min_leaf_weight);

// Builds one ensemble: member i gets seed derive_seed(seed, i), a bootstrap
// (or full) root, and a per-member RNG for node-level feature subsets.
// `build` returns the member tree; members run in parallel.
QualityImpactModel train_ensemble(
    const EncodedDataset& ds, const TreeHyperparams& hp, uint64_t seed, Approach approach,
    const std::function<Tree(const EncodedDataset&, const TreeHyperparams&, NodeData,
                             SplitMix64&)>& build);

inline LeafStats make_leaf_stats(const NodeData& nd) {
  LeafStats s;
  s.weight_correct = nd.weight_correct;
  s.weight_incorrect = nd.weight_incorrect;
  s.raw_u = nd.weight_incorrect / nd.total();
  return s;
}

}  // namespace softwrap::detail
