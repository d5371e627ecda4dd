#pragma once

#include <cstdint>
#include <vector>

#include "softwrap/schema.hpp"

namespace softwrap {

// Randomized, reproducible partition of a dataset. Part sizes are
// floor(fraction * N) with the remainder assigned to the last part.
// When the dataset carries sequence ids, whole sequences are shuffled and
// assigned (no sequence straddles two parts); sizes are then best-effort.
std::vector<Dataset> split_dataset(const Dataset& ds, const std::vector<double>& fractions,
                                   uint64_t seed);

}  // namespace softwrap
