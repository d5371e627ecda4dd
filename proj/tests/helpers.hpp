#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "softwrap/encode.hpp"
#include "softwrap/schema.hpp"

namespace testutil {

// Unique scratch directory per test run, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("softwrap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

 private:
  std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// schema: one continuous feature x, binary label
inline softwrap::FeatureSchema one_feature_schema() {
  softwrap::FeatureSchema s;
  s.features = {{"x", softwrap::FeatureKind::Continuous, {}, ""}};
  return s;
}

// schema: continuous distance + categorical ped_type
inline softwrap::FeatureSchema mixed_schema() {
  softwrap::FeatureSchema s;
  s.features = {{"distance", softwrap::FeatureKind::Continuous, {}, "meters"},
                {"ped_type", softwrap::FeatureKind::Categorical, {"adult", "child", "cyclist"}, ""}};
  return s;
}

inline softwrap::Dataset one_feature_dataset(const std::vector<double>& xs,
                                             const std::vector<int>& labels) {
  softwrap::Dataset ds;
  ds.schema = one_feature_schema();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    softwrap::DataPoint p;
    p.values = {xs[i]};
    p.outcome_incorrect = labels[i] != 0;
    ds.points.push_back(std::move(p));
  }
  return ds;
}

// Independent entropy/gain oracle (direct formulas, no library calls).
inline double oracle_entropy(double a, double b) {
  double total = a + b, h = 0.0;
  for (double w : {a, b})
    if (w > 0) h -= (w / total) * std::log2(w / total);
  return h;
}

struct OracleSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
  bool found = false;
};

// Brute-force best split: every feature, every midpoint between consecutive
// distinct sorted values; children below min_leaf_weight are skipped; ties
// resolved by lowest feature index, then lowest threshold (strict >).
inline OracleSplit oracle_best_split(const std::vector<std::vector<double>>& x,
                                     const std::vector<int>& y, double min_leaf_weight) {
  const std::size_t n = y.size();
  const std::size_t d = x.size();
  double parent_c = 0, parent_i = 0;
  for (std::size_t r = 0; r < n; ++r) (y[r] ? parent_i : parent_c) += 1.0;
  double parent_h = oracle_entropy(parent_c, parent_i);
  OracleSplit best;
  for (std::size_t f = 0; f < d; ++f) {
    std::vector<double> sorted(x[f]);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      double thr = (sorted[k] + sorted[k + 1]) / 2.0;
      double lc = 0, li = 0, rc = 0, ri = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (x[f][r] <= thr)
          (y[r] ? li : lc) += 1.0;
        else
          (y[r] ? ri : rc) += 1.0;
      }
      if (lc + li < min_leaf_weight || rc + ri < min_leaf_weight) continue;
      double total = parent_c + parent_i;
      double gain = parent_h - ((lc + li) / total) * oracle_entropy(lc, li) -
                    ((rc + ri) / total) * oracle_entropy(rc, ri);
      if (gain > best.gain) {
        best = {static_cast<int>(f), thr, gain, true};
      }
    }
  }
  return best;
}

}  // namespace testutil
