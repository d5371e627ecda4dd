#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "softwrap/evaluation.hpp"
#include "softwrap/model.hpp"
#include "softwrap/schema.hpp"

namespace softwrap {

// End-to-end comparison run: generate data (uniform training set,
// representative calibration/evaluation sets), train all six approaches,
// calibrate, evaluate, profile boundary softness, and pick a winner.
struct StudyConfig {
  std::size_t train_n = 50000;
  std::size_t cal_n = 20000;
  std::size_t eval_n = 20000;
  uint64_t seed = 1;
  double confidence_level = 0.9999;
  std::filesystem::path out_dir;  // empty = do not write files
  bool grid = false;              // small hyperparameter grid per approach
  int sweep_steps = 10000;
};

struct StudyEntry {
  std::string id;
  QualityImpactModel model;  // calibrated
  BrierReport report;
  SweepResult distance_sweep;
};

struct StudyOutcome {
  Dataset train, cal, eval;
  std::vector<StudyEntry> entries;  // one per approach, fixed order
  std::string selected;
  std::string table;  // rendered comparison table
};

// Per-approach hyperparameters used by the study when --grid is off: the
// DT stays coarse (depth 5, min leaf 200) for stable, well-calibrated
// clusters; the softening approaches run at depth 8 / min leaf 50.
TreeHyperparams study_hyperparams(Approach a);

// The data point whose distance profile the study sweeps.
DataPoint study_sweep_base();

StudyOutcome run_study(const StudyConfig& cfg, std::ostream* log = nullptr);

}  // namespace softwrap
