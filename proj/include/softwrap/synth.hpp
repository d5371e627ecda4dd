#pragma once

#include <cstdint>
#include <vector>

#include "softwrap/schema.hpp"

namespace softwrap {

// The fixed pedestrian-detection scenario schema:
//   distance      continuous [0, 25] meters
//   precipitation continuous [0, 100] percent
//   fog           continuous [0, 100] percent
//   occlusion     continuous [0, 0.5] fraction
//   ped_type      categorical {adult, child, cyclist}
//   label         outcome_incorrect
const FeatureSchema& scenario_schema();

enum class GenMode { Uniform, Representative };

struct GeneratorConfig {
  GenMode mode = GenMode::Uniform;
  std::size_t n = 0;
  uint64_t seed = 0;
  bool emit_truth = false;  // callers may request the true_p column
};

// Ground-truth incorrectness probability of the synthetic detector:
//   p = clamp(sigmoid(-3.1 + 0.12*distance + 0.010*precipitation
//                     + 0.015*fog + 3.0*occlusion + tau(ped_type)), 0.01, 0.99)
// with tau(adult)=0, tau(child)=0.6, tau(cyclist)=0.3. The coefficients are
// frozen constants of this artifact; monotone nondecreasing in every
// continuous factor.
double true_probability(const FeatureSchema& schema, const DataPoint& x);

// Deterministic per-point generation (counter-based streams derived from
// seed and point index). Uniform mode draws every factor uniformly over its
// range; representative mode uses the skewed target-scope distributions.
// Labels are Bernoulli draws from true_probability. `truth_out`, when given,
// receives the per-point ground-truth probability.
Dataset generate(const GeneratorConfig& cfg, std::vector<double>* truth_out = nullptr);

}  // namespace softwrap
