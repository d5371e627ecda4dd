#include "softwrap/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

namespace softwrap {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::UnparsableValue: return "UnparsableValue";
    case ErrorKind::UnknownCategory: return "UnknownCategory";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::BadFractions: return "BadFractions";
    case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorKind::CorruptModel: return "CorruptModel";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
    case ErrorKind::InconsistentWeights: return "InconsistentWeights";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::DegenerateLeaves: return "DegenerateLeaves";
    case ErrorKind::BadArguments: return "BadArguments";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::EmptyCalibrationSet: return "EmptyCalibrationSet";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::Empty: return "Empty";
    case ErrorKind::NotContinuousFeature: return "NotContinuousFeature";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

unsigned thread_cap() {
  if (const char* env = std::getenv("SOFTWRAP_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = thread_cap();
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double v) {
  char buf[40];
  // try increasing precision until the value round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace softwrap
