#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "softwrap/encode.hpp"
#include "softwrap/model.hpp"

namespace softwrap {

// Three ascending anchors defining the triangular/shoulder partition of a
// continuous feature. a and c are the node-local minimum and maximum of the
// occurring values.
struct FuzzyPartition {
  double a = 0.0, b = 0.0, c = 0.0;
};

// Membership of x in the (left, mid, right) fuzzy sets of the partition.
// Ruspini property: the three values sum to 1 for any x in [a, c]; x below a
// maps to (1,0,0) and above c to (0,0,1).
Membership membership(const FuzzyPartition& p, double x);

// Same closed form as entropy(), over membership-weighted class sums.
double fuzzy_entropy(double weight_a, double weight_b);

struct FuzzySplitCandidate {
  FuzzyPartition partition;
  double gain = 0.0;
};

// Searches the gain-maximizing middle anchor b among the midpoints of n_bins
// equal-width bins spanning (min, max) of the values. Ties pick the smaller
// b. Returns nullopt (no valid split) when all values are identical, every
// candidate is filtered out, or the best gain is below min_gain. Candidates
// are filtered when min_child_weight > 0 and any child would fall below it.
std::optional<FuzzySplitCandidate> find_fuzzy_partition(std::span<const double> values,
                                                        std::span<const double> point_weights,
                                                        std::span<const uint8_t> labels,
                                                        int n_bins, double min_gain = 0.0,
                                                        double min_child_weight = 0.0);

// CART-like induction over membership-weighted points: one-hot columns are
// evaluated as crisp binary splits, continuous columns via fuzzy partitions,
// all on the same fuzzy-information-gain scale.
QualityImpactModel train_fuzzy_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                                  uint64_t seed = 0);

// Ensemble of fuzzy trees with the same bootstrap + feature-subset machinery
// as train_rf; prediction is the member mean.
QualityImpactModel train_fuzzy_rf(const EncodedDataset& ds, const TreeHyperparams& hp,
                                  uint64_t seed);

}  // namespace softwrap
