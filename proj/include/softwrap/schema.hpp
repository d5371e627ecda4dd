#pragma once

#include <optional>
#include <string>
#include <vector>

#include "softwrap/common.hpp"

namespace softwrap {

enum class FeatureKind { Continuous, Categorical };

// One measured quality factor.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  std::vector<std::string> categories;  // categorical only, ordered
  std::string unit;                     // free-text annotation, may be empty

  bool operator==(const FeatureSpec&) const = default;
};

struct FeatureSchema {
  std::vector<FeatureSpec> features;
  std::string label_name = "outcome_incorrect";

  bool operator==(const FeatureSchema&) const = default;

  int feature_index(const std::string& name) const;  // -1 if absent

  // Throws BadConfig if the schema violates its own invariants
  // (duplicate names, categorical with < 2 categories, ...).
  void validate() const;
};

// A single observation. Continuous features store the value itself;
// categorical features store the index into FeatureSpec::categories.
// The label is absent at prediction time.
struct DataPoint {
  std::vector<double> values;
  std::optional<bool> outcome_incorrect;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<DataPoint> points;
  std::vector<std::string> sequence_ids;  // parallel to points, or empty
  std::string provenance;

  std::size_t size() const { return points.size(); }
  bool has_sequences() const { return !sequence_ids.empty(); }
};

// Checks every point against the schema (arity, category range, finiteness,
// label present). Throws SchemaMismatch / UnparsableValue on violations.
void validate_dataset(const Dataset& ds, bool require_labels);

// Builds a DataPoint from (feature name -> textual value) pairs,
// e.g. from the CLI's --point flag. All features must be present.
DataPoint parse_point(const FeatureSchema& schema,
                      const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace softwrap
