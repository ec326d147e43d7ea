#pragma once

#include <cstdint>

#include "chaoslab/common.hpp"
#include "chaoslab/forms.hpp"

namespace chaoslab {

/// A certified random unimodular witness: full-grid +-1 form together with
/// its exact sup-norm and the normalized ratio k_hat = norm / n^{(m+1)/2}.
struct KszCertificate {
  SparseMultilinearForm form;
  double certified_norm = 0.0;
  double k_hat = 0.0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials_run = 0;
  std::uint64_t best_trial = 0;
};

/// The recursive +-1 extremal forms: R_2 is the 2x2 matrix (1,1;1,-1) and
/// R_m splits the first variable into a sum and a difference of two fresh
/// coordinates, the difference branch acting on an index-shifted copy of
/// R_{m-1}. Structural invariants (2^{2m-2} monomials, +-1 coefficients,
/// 2^{m-1} distinct last-variable coordinates each used 2^{m-1} times) are
/// asserted after construction; the sup-norm 2^{m-1} is additionally
/// certified when the vertex enumeration is small (m <= 4).
SparseMultilinearForm build_rm(int m);

/// Full grid {1..n}^m with i.i.d. uniform +-1 coefficients drawn from the
/// counter-based generator; deterministic given the seed.
SparseMultilinearForm ksz_random(int m, int n, std::uint64_t seed);

/// Runs `budget` independent trials of ksz_random (trial sub-seeds derived
/// from the seed), certifies each with sup_norm, and returns the
/// minimum-norm certificate (ties to the lowest trial index).
KszCertificate ksz_search(int m, int n, std::uint64_t budget, std::uint64_t seed,
                          const RunOptions& opts = {});

}  // namespace chaoslab
