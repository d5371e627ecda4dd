#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace softwrap {

enum class ErrorKind {
  // dataset / file handling
  MissingColumn,
  UnparsableValue,
  UnknownCategory,
  EmptyFile,
  BadFractions,
  FormatVersionMismatch,
  CorruptModel,
  IoFailure,
  // training / prediction
  ZeroWeight,
  InconsistentWeights,
  InsufficientData,
  ArityMismatch,
  DegenerateLeaves,
  // calibration / evaluation
  BadArguments,
  SchemaMismatch,
  EmptyCalibrationSet,
  LengthMismatch,
  Empty,
  NotContinuousFeature,
  BadRange,
  BadConfig,
};

const char* error_kind_name(ErrorKind kind);

// All library failures surface as Error; kind() tells callers (and the CLI
// exit-code mapping) what went wrong without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Deterministic 64-bit stream (splitmix64). Used everywhere randomness is
// needed so results are reproducible across platforms and thread counts.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) { return next() % n; }
};

// splitmix64 finalizer; bijective mix of a single word.
uint64_t mix64(uint64_t x);

// Stable per-member / per-point seed derivation: hash(seed, stream).
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// Number of worker threads: SOFTWRAP_THREADS if set (>=1), else hardware.
unsigned thread_cap();

// Runs fn(i) for i in [0, n). Work is distributed over at most thread_cap()
// threads; each index is processed exactly once, so writes to per-index slots
// are race-free and results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Shortest round-trippable decimal text for a double ("%.17g" trimmed).
std::string format_double(double v);

}  // namespace softwrap
