#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "softwrap/schema.hpp"

namespace softwrap {

// One column of the one-hot encoded feature matrix. Continuous features map
// to a single column; a categorical feature with k categories maps to k
// binary columns named "feature=category".
struct EncodedColumn {
  std::string name;
  int feature = 0;     // index into the source schema
  bool onehot = false; // binary 0/1 indicator column
  int category = -1;   // category index when onehot
};

std::vector<EncodedColumn> encoding_for(const FeatureSchema& schema);

struct EncodedDataset {
  FeatureSchema schema;
  std::vector<EncodedColumn> columns;
  std::vector<double> values;   // row-major, rows x columns
  std::vector<uint8_t> labels;  // 1 = outcome incorrect
  std::size_t rows = 0;

  std::size_t cols() const { return columns.size(); }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
};

// All approaches train on this representation; every split is then a
// threshold on a numeric column (0.5 for one-hot indicator columns).
EncodedDataset one_hot_encode(const Dataset& ds);

// Encodes a single point (e.g. for prediction); label is not required.
std::vector<double> encode_point(const FeatureSchema& schema,
                                 std::span<const EncodedColumn> columns, const DataPoint& p);

}  // namespace softwrap
