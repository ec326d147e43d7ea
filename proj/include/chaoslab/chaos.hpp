#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chaoslab/common.hpp"
#include "chaoslab/dyadic.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/tensor.hpp"

namespace chaoslab {

/// One sign per (variable, coordinate) pair, rows packed as 64-bit word
/// bitmasks (set bit = -1). Row j must match axis j of the tensor at the
/// use site.
struct SignMatrix {
  std::vector<std::uint64_t> words;
  std::vector<int> lens;
  std::vector<int> row_offset;  // first word of each row

  int sign(int row, int i) const {
    const std::uint64_t w =
        words[static_cast<std::size_t>(row_offset[static_cast<std::size_t>(row)] + i / 64)];
    return (w >> (i % 64)) & 1u ? -1 : +1;
  }

  static SignMatrix sampled(const std::vector<int>& dims, const CounterRng& rng,
                            std::uint64_t sample_index);
};

enum class MomentMode { exact_enumeration, monte_carlo };

inline const char* to_string(MomentMode m) {
  return m == MomentMode::exact_enumeration ? "exact-enumeration" : "monte-carlo";
}

/// L_p norm of a multiple Rademacher sum: value is the p-th root of the
/// average of |S|^p over sign patterns. In exact mode with integer data and
/// p in {1,2,4,...} the p-th power of the moment is carried as an exact
/// dyadic rational (integer total over 2^B patterns).
struct MomentResult {
  double p = 0.0;
  double value = 0.0;
  std::optional<ExactDyadic> exact_power;
  MomentMode mode = MomentMode::exact_enumeration;
  std::uint64_t count = 0;  // pattern_count (exact) or sample_count (MC)
  std::optional<double> std_error;
};

/// r_n(t) as a measurable sign: parity of floor(2^n t), +1 at t = 0.
/// The value at interior dyadic points follows the floor convention
/// (a measure-zero choice).
int rademacher_eval(int index, double t);

/// Exact L_p moment by full enumeration of all 2^B sign patterns,
/// B = sum of axis lengths. Requires B within the bit budget.
MomentResult moment_p_exact(const CoefficientTensor& a, double p,
                            const RunOptions& opts = {});

/// Vector-valued variant (Euclidean norm in place of |.|). For p = 2 the
/// Walsh-orthonormality shortcut value^2 = sum ||y||^2 is used and needs no
/// enumeration.
MomentResult moment_p_exact_vec(const VectorTensor& y, double p,
                                const RunOptions& opts = {});

/// Monte Carlo estimate from `samples` i.i.d. sign matrices drawn with the
/// counter-based generator; deterministic given (seed, samples) and
/// independent of the worker count.
MomentResult moment_p_mc(const CoefficientTensor& a, double p,
                         std::uint64_t samples, std::uint64_t seed,
                         const RunOptions& opts = {});
MomentResult moment_p_mc(const VectorTensor& y, double p,
                         std::uint64_t samples, std::uint64_t seed,
                         const RunOptions& opts = {});

/// Exact when the shape fits the bit budget, otherwise Monte Carlo with the
/// given fallback sampling parameters.
MomentResult moment_p_auto(const CoefficientTensor& a, double p,
                           std::uint64_t mc_samples, std::uint64_t mc_seed,
                           const RunOptions& opts = {});

/// E|eps_1 + ... + eps_n| = n 2^{1-n} C(n-1, floor((n-1)/2)), as an exact
/// dyadic. The closed form behind product-structure moments at p = 1.
ExactDyadic abs_sign_sum_expectation(int n);

}  // namespace chaoslab
