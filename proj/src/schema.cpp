#include "softwrap/schema.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

namespace softwrap {

int FeatureSchema::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void FeatureSchema::validate() const {
  if (features.empty()) throw Error(ErrorKind::BadConfig, "schema has no features");
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw Error(ErrorKind::BadConfig, "feature with empty name");
    if (!seen.insert(f.name).second)
      throw Error(ErrorKind::BadConfig, "duplicate feature name '" + f.name + "'");
    if (f.kind == FeatureKind::Categorical) {
      std::set<std::string> cats(f.categories.begin(), f.categories.end());
      if (cats.size() < 2 || cats.size() != f.categories.size())
        throw Error(ErrorKind::BadConfig,
                    "categorical feature '" + f.name + "' needs >= 2 distinct categories");
    } else if (!f.categories.empty()) {
      throw Error(ErrorKind::BadConfig,
                  "continuous feature '" + f.name + "' must not list categories");
    }
  }
  if (label_name.empty()) throw Error(ErrorKind::BadConfig, "empty label name");
  if (seen.count(label_name))
    throw Error(ErrorKind::BadConfig, "label '" + label_name + "' collides with a feature");
}

void validate_dataset(const Dataset& ds, bool require_labels) {
  ds.schema.validate();
  const auto& feats = ds.schema.features;
  for (std::size_t r = 0; r < ds.points.size(); ++r) {
    const DataPoint& p = ds.points[r];
    if (p.values.size() != feats.size())
      throw Error(ErrorKind::SchemaMismatch, "point " + std::to_string(r) + " has arity " +
                                                 std::to_string(p.values.size()) + ", expected " +
                                                 std::to_string(feats.size()));
    for (std::size_t c = 0; c < feats.size(); ++c) {
      double v = p.values[c];
      if (feats[c].kind == FeatureKind::Continuous) {
        if (!std::isfinite(v))
          throw Error(ErrorKind::UnparsableValue,
                      "non-finite value in row " + std::to_string(r) + ", column " + feats[c].name);
      } else {
        int idx = static_cast<int>(v);
        if (v != idx || idx < 0 || idx >= static_cast<int>(feats[c].categories.size()))
          throw Error(ErrorKind::UnknownCategory,
                      "row " + std::to_string(r) + ", column " + feats[c].name);
      }
    }
    if (require_labels && !p.outcome_incorrect.has_value())
      throw Error(ErrorKind::SchemaMismatch, "point " + std::to_string(r) + " is unlabeled");
  }
  if (!ds.sequence_ids.empty() && ds.sequence_ids.size() != ds.points.size())
    throw Error(ErrorKind::SchemaMismatch, "sequence_ids length mismatch");
}

DataPoint parse_point(const FeatureSchema& schema,
                      const std::vector<std::pair<std::string, std::string>>& kv) {
  DataPoint p;
  p.values.assign(schema.features.size(), std::nan(""));
  std::vector<bool> set(schema.features.size(), false);
  for (const auto& [key, text] : kv) {
    int idx = schema.feature_index(key);
    if (idx < 0) throw Error(ErrorKind::MissingColumn, "unknown feature '" + key + "'");
    const FeatureSpec& spec = schema.features[static_cast<std::size_t>(idx)];
    if (spec.kind == FeatureKind::Continuous) {
      char* end = nullptr;
      double v = std::strtod(text.c_str(), &end);
      if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
        throw Error(ErrorKind::UnparsableValue, "feature '" + key + "': '" + text + "'");
      p.values[static_cast<std::size_t>(idx)] = v;
    } else {
      auto it = std::find(spec.categories.begin(), spec.categories.end(), text);
      if (it == spec.categories.end())
        throw Error(ErrorKind::UnknownCategory, "feature '" + key + "': '" + text + "'");
      p.values[static_cast<std::size_t>(idx)] =
          static_cast<double>(it - spec.categories.begin());
    }
    set[static_cast<std::size_t>(idx)] = true;
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!set[i])
      throw Error(ErrorKind::MissingColumn, "feature '" + schema.features[i].name + "' not given");
  }
  return p;
}

}  // namespace softwrap
