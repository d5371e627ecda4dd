#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "softwrap/encode.hpp"
#include "softwrap/model.hpp"

namespace softwrap {

// Two-class entropy in bits over (possibly fractional) class weights.
// 0*log2(0) := 0. Throws ZeroWeight when the total weight is not > 0.
double entropy(double weight_a, double weight_b);

// H(parent) - sum_child (W_child / W_parent) * H(child). Children must sum
// to the parent weights within 1e-9 per class (InconsistentWeights).
double info_gain(const std::pair<double, double>& parent,
                 const std::vector<std::pair<double, double>>& children);

// CART-style greedy induction with entropy gain; thresholds are midpoints
// between consecutive distinct sorted values. Optional per-point weights
// (bootstrap multiplicities for ensembles).
QualityImpactModel train_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                            const std::vector<double>* weights = nullptr);

// Bootstrap-resampled ensemble; node-level feature subsets of size
// hp.feature_subset (0 = ceil(sqrt(d))). Member i trains with seed
// derive_seed(seed, i); members are independent and may train in parallel.
QualityImpactModel train_rf(const EncodedDataset& ds, const TreeHyperparams& hp, uint64_t seed);

}  // namespace softwrap
