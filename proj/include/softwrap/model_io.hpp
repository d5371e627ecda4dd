#pragma once

#include <filesystem>
#include <string>

#include "softwrap/model.hpp"

namespace softwrap {

inline constexpr const char* kModelFormatVersion = "1";

// JSON model file: {"format_version","approach","schema","hyperparams",
// "calibrated","confidence_level","member_seeds","trees":[{"root","nodes"}]}.
// Node ids are arena indexes and stay stable across save/load; doubles are
// serialized with round-trip precision, so predictions survive exactly.
std::string model_to_json(const QualityImpactModel& m);
QualityImpactModel model_from_json(const std::string& text);

void save_model(const QualityImpactModel& m, const std::filesystem::path& path);
QualityImpactModel load_model(const std::filesystem::path& path);

}  // namespace softwrap
