#pragma once

#include "softwrap/model.hpp"
#include "softwrap/schema.hpp"

namespace softwrap {

struct CalibrationConfig {
  double confidence_level = 0.9999;
  double fallback_u = 1.0;  // leaves that receive no calibration weight
};

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation (modified Lentz); absolute accuracy well
// below the 1e-10 bisection tolerance used by cp_upper.
double regularized_incomplete_beta(double a, double b, double x);

// One-sided Clopper-Pearson upper confidence bound for an error proportion:
// the smallest p with BetaCDF(p; k+1, n-k) >= CL, found by bisection to
// absolute tolerance 1e-10. Supports fractional k and n (membership-weighted
// counts). k >= n or n = 0 give 1.0.
double cp_upper(double weighted_incorrect, double weighted_total, double confidence_level);

// Routes every calibration point through the model, accumulating fractional
// per-leaf (weight, weight * label); each member of an ensemble is calibrated
// independently on the full calibration set. Leaves get
// calibrated_u = cp_upper(...) (or fallback_u at zero weight); tree structure
// is untouched and raw_u is retained.
QualityImpactModel calibrate_model(const QualityImpactModel& m, const Dataset& cal,
                                   const CalibrationConfig& cfg);

}  // namespace softwrap
