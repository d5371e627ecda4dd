#include "softwrap/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace softwrap {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& csv_path, const FeatureSchema& schema) {
  schema.validate();
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + csv_path.string());

  std::string header;
  if (!std::getline(in, header) || strip_cr(header).empty())
    throw Error(ErrorKind::EmptyFile, csv_path.string());
  std::vector<std::string> cols = split_line(strip_cr(header));

  const std::size_t nfeat = schema.features.size();
  std::vector<int> col_of_feature(nfeat, -1);
  int label_col = -1, seq_col = -1;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    int fi = schema.feature_index(cols[c]);
    if (fi >= 0)
      col_of_feature[static_cast<std::size_t>(fi)] = static_cast<int>(c);
    else if (cols[c] == schema.label_name)
      label_col = static_cast<int>(c);
    else if (cols[c] == "sequence_id")
      seq_col = static_cast<int>(c);
    // other columns (e.g. true_p) are ignored
  }
  for (std::size_t f = 0; f < nfeat; ++f) {
    if (col_of_feature[f] < 0)
      throw Error(ErrorKind::MissingColumn, "column '" + schema.features[f].name + "' not in " +
                                                csv_path.string());
  }
  if (label_col < 0)
    throw Error(ErrorKind::MissingColumn,
                "label column '" + schema.label_name + "' not in " + csv_path.string());

  Dataset ds;
  ds.schema = schema;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != cols.size())
      throw Error(ErrorKind::UnparsableValue,
                  "row " + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                      " cells, got " + std::to_string(cells.size()));
    DataPoint p;
    p.values.resize(nfeat);
    for (std::size_t f = 0; f < nfeat; ++f) {
      const std::string& cell = cells[static_cast<std::size_t>(col_of_feature[f])];
      const FeatureSpec& spec = schema.features[f];
      if (spec.kind == FeatureKind::Continuous) {
        char* end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
          throw Error(ErrorKind::UnparsableValue,
                      "row " + std::to_string(lineno) + ", column " + spec.name);
        p.values[f] = v;
      } else {
        auto it = std::find(spec.categories.begin(), spec.categories.end(), cell);
        if (it == spec.categories.end())
          throw Error(ErrorKind::UnknownCategory,
                      "row " + std::to_string(lineno) + ", column " + spec.name);
        p.values[f] = static_cast<double>(it - spec.categories.begin());
      }
    }
    const std::string& lv = cells[static_cast<std::size_t>(label_col)];
    if (lv == "0" || lv == "false")
      p.outcome_incorrect = false;
    else if (lv == "1" || lv == "true")
      p.outcome_incorrect = true;
    else
      throw Error(ErrorKind::UnparsableValue,
                  "row " + std::to_string(lineno) + ", column " + schema.label_name);
    ds.points.push_back(std::move(p));
    if (seq_col >= 0) ds.sequence_ids.push_back(cells[static_cast<std::size_t>(seq_col)]);
  }
  ds.provenance = "csv:" + csv_path.string();
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                  const std::vector<double>* truth) {
  std::ostringstream out;
  for (const auto& f : ds.schema.features) out << f.name << ',';
  if (ds.has_sequences()) out << "sequence_id,";
  out << ds.schema.label_name;
  if (truth) out << ",true_p";
  out << '\n';
  for (std::size_t r = 0; r < ds.points.size(); ++r) {
    const DataPoint& p = ds.points[r];
    for (std::size_t f = 0; f < ds.schema.features.size(); ++f) {
      const FeatureSpec& spec = ds.schema.features[f];
      if (spec.kind == FeatureKind::Continuous)
        out << format_double(p.values[f]);
      else
        out << spec.categories[static_cast<std::size_t>(p.values[f])];
      out << ',';
    }
    if (ds.has_sequences()) out << ds.sequence_ids[r] << ',';
    out << (p.outcome_incorrect.value_or(false) ? '1' : '0');
    if (truth) out << ',' << format_double((*truth)[r]);
    out << '\n';
  }
  atomic_write(csv_path, out.str());
}

FeatureSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnparsableValue, path.string() + ": " + e.what());
  }
  FeatureSchema schema;
  try {
    for (const auto& jf : j.at("features")) {
      FeatureSpec spec;
      spec.name = jf.at("name").get<std::string>();
      std::string kind = jf.at("kind").get<std::string>();
      if (kind == "continuous")
        spec.kind = FeatureKind::Continuous;
      else if (kind == "categorical")
        spec.kind = FeatureKind::Categorical;
      else
        throw Error(ErrorKind::UnparsableValue, "feature kind '" + kind + "'");
      if (jf.contains("categories")) spec.categories = jf["categories"].get<std::vector<std::string>>();
      if (jf.contains("unit")) spec.unit = jf["unit"].get<std::string>();
      schema.features.push_back(std::move(spec));
    }
    schema.label_name = j.at("label").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnparsableValue, path.string() + ": " + e.what());
  }
  schema.validate();
  return schema;
}

void save_schema(const FeatureSchema& schema, const std::filesystem::path& path) {
  nlohmann::json j;
  j["features"] = nlohmann::json::array();
  for (const auto& f : schema.features) {
    nlohmann::json jf;
    jf["name"] = f.name;
    jf["kind"] = f.kind == FeatureKind::Continuous ? "continuous" : "categorical";
    if (f.kind == FeatureKind::Categorical) jf["categories"] = f.categories;
    if (!f.unit.empty()) jf["unit"] = f.unit;
    j["features"].push_back(std::move(jf));
  }
  j["label"] = schema.label_name;
  atomic_write(path, j.dump(2) + "\n");
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "rename to " + path.string() + ": " + ec.message());
}

}  // namespace softwrap
