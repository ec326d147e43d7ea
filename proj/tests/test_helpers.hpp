#pragma once

// Brute-force oracles and seeded generators shared by the suites. The
// oracles recompute everything directly from definitions, with none of the
// Gray-code or factorization machinery of the library paths they check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "chaoslab/forms.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/tensor.hpp"

namespace testutil {

using chaoslab::CoefficientTensor;
using chaoslab::CounterRng;
using chaoslab::SparseMultilinearForm;
using chaoslab::VectorTensor;

// Direct enumeration of all sign matrices; per pattern, a full scan of the
// tensor with the sign product recomputed entry by entry.
inline double naive_moment(const CoefficientTensor& a, double p) {
  const int m = a.order();
  std::vector<int> offset(static_cast<std::size_t>(m));
  int bits = 0;
  for (int j = 0; j < m; ++j) {
    offset[static_cast<std::size_t>(j)] = bits;
    bits += a.dim(j);
  }
  double total = 0.0;
  for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << bits); ++pat) {
    double s = 0.0;
    for (std::int64_t e = 0; e < a.size(); ++e) {
      std::int64_t rem = e;
      int sign = 1;
      for (int j = m - 1; j >= 0; --j) {
        const int i = static_cast<int>(rem % a.dim(j));
        rem /= a.dim(j);
        if ((pat >> (offset[static_cast<std::size_t>(j)] + i)) & 1u) sign = -sign;
      }
      s += sign * a.flat(e);
    }
    total += std::pow(std::abs(s), p);
  }
  return std::pow(total / std::ldexp(1.0, bits), 1.0 / p);
}

inline double naive_moment_vec(const VectorTensor& y, double p) {
  const int m = y.order();
  const int d = y.ambient_dim();
  std::vector<int> offset(static_cast<std::size_t>(m));
  int bits = 0;
  for (int j = 0; j < m; ++j) {
    offset[static_cast<std::size_t>(j)] = bits;
    bits += y.dims()[static_cast<std::size_t>(j)];
  }
  double total = 0.0;
  std::vector<double> s(static_cast<std::size_t>(d));
  for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << bits); ++pat) {
    std::fill(s.begin(), s.end(), 0.0);
    for (std::int64_t e = 0; e < y.size(); ++e) {
      std::int64_t rem = e;
      int sign = 1;
      for (int j = m - 1; j >= 0; --j) {
        const int i = static_cast<int>(rem % y.dims()[static_cast<std::size_t>(j)]);
        rem /= y.dims()[static_cast<std::size_t>(j)];
        if ((pat >> (offset[static_cast<std::size_t>(j)] + i)) & 1u) sign = -sign;
      }
      for (int c = 0; c < d; ++c)
        s[static_cast<std::size_t>(c)] += sign * y.component(e, c);
    }
    double q = 0.0;
    for (double x : s) q += x * x;
    total += std::pow(std::sqrt(q), p);
  }
  return std::pow(total / std::ldexp(1.0, bits), 1.0 / p);
}

// Supremum over every vertex of every variable (the last variable is NOT
// optimized analytically here), evaluating the form directly.
inline double naive_sup_norm(const SparseMultilinearForm& f) {
  const int m = f.order();
  std::vector<int> offset(static_cast<std::size_t>(m));
  int bits = 0;
  for (int j = 0; j < m; ++j) {
    offset[static_cast<std::size_t>(j)] = bits;
    bits += f.var_degree(j);
  }
  double best = 0.0;
  for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << bits); ++pat) {
    std::vector<std::vector<double>> x(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      x[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(f.var_degree(j)));
      for (int i = 0; i < f.var_degree(j); ++i)
        x[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
            (pat >> (offset[static_cast<std::size_t>(j)] + i)) & 1u ? -1.0 : 1.0;
    }
    best = std::max(best, std::abs(evaluate(f, x)));
  }
  return best;
}

// Seeded random inputs for property suites.
inline CoefficientTensor random_int_tensor(std::uint64_t seed, int max_order,
                                           int max_dim, int max_abs_entry,
                                           bool nonzero = true) {
  const CounterRng rng(seed);
  const int m = 1 + static_cast<int>(rng.word(10, 0) % static_cast<std::uint64_t>(max_order));
  std::vector<int> dims;
  std::int64_t cells = 1;
  for (int j = 0; j < m; ++j) {
    dims.push_back(1 + static_cast<int>(rng.word(10, 1 + static_cast<std::uint64_t>(j)) %
                                        static_cast<std::uint64_t>(max_dim)));
    cells *= dims.back();
  }
  std::vector<double> entries(static_cast<std::size_t>(cells));
  bool any = false;
  for (std::int64_t i = 0; i < cells; ++i) {
    const int span = 2 * max_abs_entry + 1;
    int v = static_cast<int>(rng.word(11, static_cast<std::uint64_t>(i)) %
                             static_cast<std::uint64_t>(span)) - max_abs_entry;
    entries[static_cast<std::size_t>(i)] = v;
    any = any || v != 0;
  }
  if (nonzero && !any) entries[0] = 1.0;
  return CoefficientTensor(dims, entries);
}

inline CoefficientTensor random_real_tensor(std::uint64_t seed, int max_order,
                                            int max_dim, double scale) {
  const CounterRng rng(seed);
  const int m = 1 + static_cast<int>(rng.word(20, 0) % static_cast<std::uint64_t>(max_order));
  std::vector<int> dims;
  std::int64_t cells = 1;
  for (int j = 0; j < m; ++j) {
    dims.push_back(1 + static_cast<int>(rng.word(20, 1 + static_cast<std::uint64_t>(j)) %
                                        static_cast<std::uint64_t>(max_dim)));
    cells *= dims.back();
  }
  std::vector<double> entries(static_cast<std::size_t>(cells));
  for (std::int64_t i = 0; i < cells; ++i)
    entries[static_cast<std::size_t>(i)] =
        scale * (2.0 * rng.uniform01(21, static_cast<std::uint64_t>(i)) - 1.0);
  return CoefficientTensor(dims, entries);
}

inline VectorTensor random_vector_tensor(std::uint64_t seed, int max_order, int max_dim,
                                         int max_ambient, double scale) {
  const CounterRng rng(seed);
  const int m = 1 + static_cast<int>(rng.word(30, 0) % static_cast<std::uint64_t>(max_order));
  const int d = 1 + static_cast<int>(rng.word(30, 1) % static_cast<std::uint64_t>(max_ambient));
  std::vector<int> dims;
  std::int64_t cells = 1;
  for (int j = 0; j < m; ++j) {
    dims.push_back(1 + static_cast<int>(rng.word(30, 2 + static_cast<std::uint64_t>(j)) %
                                        static_cast<std::uint64_t>(max_dim)));
    cells *= dims.back();
  }
  std::vector<double> comps(static_cast<std::size_t>(cells * d));
  for (std::size_t i = 0; i < comps.size(); ++i)
    comps[i] = scale * (2.0 * rng.uniform01(31, i) - 1.0);
  return VectorTensor(dims, d, comps);
}

}  // namespace testutil
