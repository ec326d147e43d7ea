#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/constructions.hpp"
#include "chaoslab/dyadic.hpp"
#include "chaoslab/forms.hpp"
#include "chaoslab/tensor.hpp"

namespace chaoslab {

// Relative slack for floating-point verdicts; exact comparisons are used
// wherever dyadic data is available.
inline constexpr double kHoldsSlack = 1e-12;

struct BoundContext {
  std::string theorem;
  int m = 0;
  std::vector<int> dims;
  double r = 0.0;
  double p = 0.0;
};

/// One checked inequality instance: lhs <= constant * n^exponent * moment,
/// with the computed sides, the verdict, and the moment that backed it.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant_used = 0.0;
  double exponent_used = 0.0;
  std::optional<MomentResult> moment;
  double ratio = 0.0;  // lhs / rhs (0 when rhs vanishes)
  bool holds = false;
  BoundContext context;
};

/// Least-squares power-law fit on (log n, log value).
struct FitResult {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

/// The constants the estimates pin exactly.
struct CertifiedConstant {
  const char* name;
  double value;
  const char* source;
};

const std::vector<CertifiedConstant>& constants_table();

inline constexpr double kA1 = 0.70710678118654752440;        // 1/sqrt(2)
inline constexpr double kK12 = 1.41421356237309504880;       // sqrt(2)
inline constexpr double kBpUpToTwo = 1.0;
inline constexpr double kCotype2Hilbert = 1.0;

// MC fallback parameters for shapes beyond the exact budget.
struct MomentFallback {
  std::uint64_t samples = 1u << 18;
  std::uint64_t seed = 0;
};

/// L_p moment over the ell_2 norm of an order-1 tensor; lies in
/// [1/sqrt(2), 1] at p = 1.
double khinchin_ratio(const CoefficientTensor& a, double p,
                      const RunOptions& opts = {}, const MomentFallback& fb = {});

/// ell_2(a) <= 2^{m/2} * moment_1(a).
BoundReport verify_multik(const CoefficientTensor& a, const RunOptions& opts = {},
                          const MomentFallback& fb = {});

/// ell_r(a) <= 2^{m/2} n^{m(1/r-1/2)} moment_1(a), uniform dims, 0 < r < 2.
BoundReport verify_theorem1(const CoefficientTensor& a, double r,
                            const RunOptions& opts = {}, const MomentFallback& fb = {});

/// mixed_norm(a,spec) <= 2^{m/2} n^{sum 1/r_j - m/2} moment_1(a), all r_j < 2.
BoundReport verify_mixed(const CoefficientTensor& a, const MixedNormSpec& spec,
                         const RunOptions& opts = {}, const MomentFallback& fb = {});

/// ell_r(a) <= 2^{m/r} * moment_1(a), r >= 2.
BoundReport verify_prop(const CoefficientTensor& a, double r,
                        const RunOptions& opts = {}, const MomentFallback& fb = {});

/// max |a| <= moment_1(a) (multi-index contraction principle).
BoundReport verify_contraction(const CoefficientTensor& a, const RunOptions& opts = {},
                               const MomentFallback& fb = {});
BoundReport verify_contraction(const VectorTensor& y, const RunOptions& opts = {},
                               const MomentFallback& fb = {});

/// moment_2(y) <= sqrt(2)^m * moment_1(y); only (p,q) = (1,2) carries a
/// certified constant.
BoundReport verify_multiple_kahane(const VectorTensor& y, double p = 1.0, double q = 2.0,
                                   const RunOptions& opts = {},
                                   const MomentFallback& fb = {});

/// ell_r of entry norms <= 2^{m/r} * moment_1(y), r >= 2 (Hilbert case).
BoundReport verify_hilbert_prop(const VectorTensor& y, double r,
                                const RunOptions& opts = {},
                                const MomentFallback& fb = {});

/// Certified lower bound for the optimal constant in the r >= 2 estimate,
/// from the last-variable slices of an order-(m+1) form:
/// bound = sum_k ell_r(slice_k) / sum_k moment_1(slice_k).
/// On integer +-1 forms the slice moments are exact dyadics and, for integer
/// r, the slice ell_r^r masses are exact integers.
struct SliceLowerBound {
  BoundReport report;            // ratio field carries the bound
  double bound = 0.0;
  std::vector<MomentResult> slice_moments;
  std::optional<ExactDyadic> moment_sum_exact;
  std::optional<std::vector<BigInt>> slice_lr_pow_exact;
};

SliceLowerBound lower_bound_from_slices(const SparseMultilinearForm& f, double r,
                                        const RunOptions& opts = {});

/// Lower bound on the best constant at grid size n implied by a KSZ witness
/// of order m+1: C(n) >= n^{1+m/r} / certified_norm (equivalently
/// n^{m(1/r-1/2)} / k_hat). holds compares it against the theorem ceiling
/// 2^{m/2} n^{m(1/r-1/2)}.
BoundReport ksz_exponent_bound(const KszCertificate& cert, double r);

/// Least squares on (log n, log value); needs >= 3 points, all positive.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace chaoslab
