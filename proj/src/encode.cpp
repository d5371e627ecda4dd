#include "softwrap/encode.hpp"

namespace softwrap {

std::vector<EncodedColumn> encoding_for(const FeatureSchema& schema) {
  std::vector<EncodedColumn> cols;
  for (std::size_t f = 0; f < schema.features.size(); ++f) {
    const FeatureSpec& spec = schema.features[f];
    if (spec.kind == FeatureKind::Continuous) {
      cols.push_back({spec.name, static_cast<int>(f), false, -1});
    } else {
      for (std::size_t c = 0; c < spec.categories.size(); ++c) {
        cols.push_back({spec.name + "=" + spec.categories[c], static_cast<int>(f), true,
                        static_cast<int>(c)});
      }
    }
  }
  return cols;
}

EncodedDataset one_hot_encode(const Dataset& ds) {
  if (ds.points.empty()) throw Error(ErrorKind::Empty, "cannot encode an empty dataset");
  EncodedDataset enc;
  enc.schema = ds.schema;
  enc.columns = encoding_for(ds.schema);
  enc.rows = ds.points.size();
  enc.values.resize(enc.rows * enc.cols());
  enc.labels.resize(enc.rows);
  for (std::size_t r = 0; r < enc.rows; ++r) {
    const DataPoint& p = ds.points[r];
    if (p.values.size() != ds.schema.features.size())
      throw Error(ErrorKind::SchemaMismatch, "point " + std::to_string(r) + " arity mismatch");
    double* dst = enc.values.data() + r * enc.cols();
    for (std::size_t c = 0; c < enc.cols(); ++c) {
      const EncodedColumn& col = enc.columns[c];
      double v = p.values[static_cast<std::size_t>(col.feature)];
      dst[c] = col.onehot ? (static_cast<int>(v) == col.category ? 1.0 : 0.0) : v;
    }
    if (!p.outcome_incorrect.has_value())
      throw Error(ErrorKind::SchemaMismatch, "point " + std::to_string(r) + " is unlabeled");
    enc.labels[r] = *p.outcome_incorrect ? 1 : 0;
  }
  return enc;
}

std::vector<double> encode_point(const FeatureSchema& schema,
                                 std::span<const EncodedColumn> columns, const DataPoint& p) {
  if (p.values.size() != schema.features.size())
    throw Error(ErrorKind::ArityMismatch, "point arity " + std::to_string(p.values.size()) +
                                              ", schema expects " +
                                              std::to_string(schema.features.size()));
  std::vector<double> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const EncodedColumn& col = columns[c];
    double v = p.values[static_cast<std::size_t>(col.feature)];
    out[c] = col.onehot ? (static_cast<int>(v) == col.category ? 1.0 : 0.0) : v;
  }
  return out;
}

}  // namespace softwrap
