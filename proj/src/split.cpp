#include "softwrap/split.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

namespace softwrap {

std::vector<Dataset> split_dataset(const Dataset& ds, const std::vector<double>& fractions,
                                   uint64_t seed) {
  if (fractions.empty()) throw Error(ErrorKind::BadFractions, "no fractions given");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw Error(ErrorKind::BadFractions, "fractions must be > 0");
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw Error(ErrorKind::BadFractions, "fractions sum to " + format_double(sum));

  const std::size_t n = ds.points.size();
  const std::size_t parts = fractions.size();

  // groups of row indices: one per sequence id, or singletons
  std::vector<std::vector<std::size_t>> groups;
  if (ds.has_sequences()) {
    std::unordered_map<std::string, std::size_t> group_of;
    for (std::size_t r = 0; r < n; ++r) {
      auto [it, fresh] = group_of.try_emplace(ds.sequence_ids[r], groups.size());
      if (fresh) groups.emplace_back();
      groups[it->second].push_back(r);
    }
  } else {
    groups.resize(n);
    for (std::size_t r = 0; r < n; ++r) groups[r].push_back(r);
  }

  // Fisher-Yates over groups, driven by the deterministic stream
  SplitMix64 rng(derive_seed(seed, 0x53504C4954ULL));
  for (std::size_t i = groups.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(groups[i - 1], groups[j]);
  }

  std::vector<std::size_t> targets(parts);
  for (std::size_t p = 0; p < parts; ++p)
    targets[p] = static_cast<std::size_t>(std::floor(fractions[p] * static_cast<double>(n)));

  std::vector<Dataset> out(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    out[p].schema = ds.schema;
    out[p].provenance = ds.provenance + " split[" + std::to_string(p) + "]/seed=" +
                        std::to_string(seed);
  }

  std::size_t part = 0;
  for (const auto& group : groups) {
    // advance past parts that met their quota; last part absorbs the rest
    while (part + 1 < parts && out[part].points.size() >= targets[part]) ++part;
    for (std::size_t r : group) {
      out[part].points.push_back(ds.points[r]);
      if (ds.has_sequences()) out[part].sequence_ids.push_back(ds.sequence_ids[r]);
    }
  }
  return out;
}

}  // namespace softwrap
