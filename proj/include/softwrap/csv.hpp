#pragma once

#include <filesystem>
#include <string>

#include "softwrap/schema.hpp"

namespace softwrap {

// Reads a UTF-8, comma-separated, header-first dataset. Columns must cover
// every schema feature plus the label column; an optional `sequence_id`
// column is captured, a `true_p` column (generator ground truth) is ignored.
// Label values: {0,1,true,false}.
Dataset load_dataset(const std::filesystem::path& csv_path, const FeatureSchema& schema);

// Writes the dataset in the same format. `truth` (optional, one entry per
// point) adds a true_p column. Output is written atomically.
void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                  const std::vector<double>* truth = nullptr);

// Schema sidecar (JSON).
FeatureSchema load_schema(const std::filesystem::path& path);
void save_schema(const FeatureSchema& schema, const std::filesystem::path& path);

// Writes `content` to `path` via a temp file + rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace softwrap
