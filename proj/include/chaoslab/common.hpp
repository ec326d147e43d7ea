#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace chaoslab {

inline constexpr const char* kVersion = "0.1.0";

// Hard container limits for dense tensors.
inline constexpr int kMaxOrder = 8;
inline constexpr std::int64_t kMaxEntries = std::int64_t{1} << 24;

// Default enumeration budgets, in total sign bits.
inline constexpr int kDefaultMomentBits = 26;
inline constexpr int kDefaultVertexBits = 24;
// Absolute ceiling so pattern counts always fit a uint64.
inline constexpr int kHardBitCeiling = 62;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested enumeration does not fit the sign-bit budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Malformed text input (tensor/form/CSV files, CLI values).
class ParseError : public Error {
 public:
  using Error::Error;
};

// CHAOSLAB_MAX_BITS overrides both enumeration budgets; returns -1 when unset.
inline int env_max_bits() {
  const char* v = std::getenv("CHAOSLAB_MAX_BITS");
  if (v == nullptr || *v == '\0') return -1;
  char* end = nullptr;
  long bits = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || bits < 1) return -1;
  if (bits > kHardBitCeiling) bits = kHardBitCeiling;
  return static_cast<int>(bits);
}

inline int moment_bit_budget() {
  int env = env_max_bits();
  return env > 0 ? env : kDefaultMomentBits;
}

inline int vertex_bit_budget() {
  int env = env_max_bits();
  return env > 0 ? env : kDefaultVertexBits;
}

// Shared execution knobs. max_bits <= 0 means "module default (or env override)";
// threads <= 0 means hardware concurrency.
struct RunOptions {
  int max_bits = 0;
  int threads = 0;
};

}  // namespace chaoslab
