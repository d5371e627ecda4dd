#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "softwrap/encode.hpp"
#include "softwrap/model.hpp"

namespace softwrap {

// Sigmoid routing gate on a single encoded feature: weight
// g = sigma(slope * x + offset) goes to the right child, 1-g to the left.
struct SoftGate {
  int feature_index = -1;
  double slope = 0.0;
  double offset = 0.0;

  double operator()(double x) const { return sigmoid(slope * x + offset); }
  double crossing() const { return -offset / slope; }
};

struct GatePoint {
  double x = 0.0;  // feature value
  double w = 0.0;  // point weight
  double y = 0.0;  // label, 1 = incorrect
};

struct LossGrad {
  double loss = 0.0;
  double d_slope = 0.0;
  double d_offset = 0.0;
};

// Weighted binary cross-entropy of the two-leaf soft mixture
// p_i = (1-g_i) p_left + g_i p_right with its analytic gradient in
// (slope, offset). p_left/p_right must lie in [1e-6, 1-1e-6]. Throws
// DegenerateLeaves when |p_right - p_left| < 1e-12 (gradient identically 0).
LossGrad node_loss_and_gradient(double slope, double offset, std::span<const GatePoint> points,
                                double p_left, double p_right);

// Fits the gate by damped gradient descent starting from a steep sigmoid at
// the hard threshold t. Each iteration recomputes the leaf rates from the
// current gate, then steps (slope, offset) with step learning_rate /
// (1 + |grad|); steps that would increase the loss are backtracked, so the
// recorded loss sequence is non-increasing. max_iters = 0 returns the
// initialization unchanged.
SoftGate fit_gate(std::span<const GatePoint> points, double hard_threshold, const GdParams& gd);

// As above; appends the loss after initialization and after every accepted
// step to loss_history (used by the descent-monotonicity checks).
SoftGate fit_gate(std::span<const GatePoint> points, double hard_threshold, const GdParams& gd,
                  std::vector<double>* loss_history);

// Univariate soft decision tree: split feature and threshold are chosen by
// entropy gain exactly as in train_dt, then the gate is fitted on that
// feature; points descend to both children with complementary gate weights.
QualityImpactModel train_soft_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                                 uint64_t seed = 0);

// Bagged ensemble of soft trees (bootstrap resamples, full feature set).
QualityImpactModel train_bagged_soft_dt(const EncodedDataset& ds, const TreeHyperparams& hp,
                                        uint64_t seed);

}  // namespace softwrap
