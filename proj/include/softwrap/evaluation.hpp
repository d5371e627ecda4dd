#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "softwrap/model.hpp"
#include "softwrap/schema.hpp"

namespace softwrap {

enum class BinningMode {
  Auto,    // unique when the forecast has <= 1000 distinct values, else fixed
  Unique,  // group identical forecast values
  Fixed,   // k equal-width bins over [0,1], forecast = within-bin mean
};

struct Binning {
  BinningMode mode = BinningMode::Auto;
  int bins = 100;
};

// One Table-1 style row: Brier score and its Murphy decomposition
// bs = var - res + unr, plus uns = var - res and the underestimation share
// oconf of unr.
struct BrierReport {
  double bs = 0.0;
  double var = 0.0;
  double res = 0.0;
  double uns = 0.0;
  double unr = 0.0;
  double oconf = 0.0;
  std::size_t n_points = 0;
  bool unique_binning = true;
  int bins_used = 0;  // 0 in unique mode
  double identity_residual = 0.0;
};

double brier_score(std::span<const double> forecasts, std::span<const uint8_t> outcomes);

BrierReport decompose(std::span<const double> forecasts, std::span<const uint8_t> outcomes,
                      const Binning& binning = {});

// Evaluates the model over a labeled dataset (calibrated estimates when the
// model is calibrated) and decomposes the result.
BrierReport evaluate_model(const QualityImpactModel& m, const Dataset& eval,
                           const Binning& binning = {});

// Uncertainty profile over one continuous feature, holding the other
// features of `base` fixed. Exposes the decision-boundary softness of the
// model: max_jump is the largest step-to-step change.
struct SweepResult {
  std::string feature;
  std::vector<double> grid;
  std::vector<double> u_values;
  double max_jump = 0.0;

  int jump_count(double tau = 0.02) const;
};

SweepResult sweep(const QualityImpactModel& m, const DataPoint& base, const std::string& feature,
                  double lo, double hi, int steps);

// Lexicographic selection: min bs, ties within eps resolved by min unr,
// remaining ties by lowest model id.
std::string select_best(const std::vector<std::pair<std::string, BrierReport>>& reports,
                        double eps = 1e-3);

// Fixed-width comparison table (5-decimal, leading-dot values) and the
// machine-readable CSV counterpart.
std::string render_report_table(const std::vector<std::pair<std::string, BrierReport>>& reports);
std::string render_report_csv(const std::vector<std::pair<std::string, BrierReport>>& reports);
std::vector<std::pair<std::string, BrierReport>> parse_report_csv(const std::string& content);

// Two-column CSV (feature value, uncertainty) for external plotting.
std::string sweep_to_csv(const SweepResult& s);
// Minimal standalone SVG line chart of the sweep.
std::string sweep_to_svg(const SweepResult& s);

}  // namespace softwrap
