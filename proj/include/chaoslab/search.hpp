#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chaoslab/common.hpp"
#include "chaoslab/inequalities.hpp"
#include "chaoslab/tensor.hpp"

namespace chaoslab {

enum class SearchStrategy {
  exhaustive_signs,
  sign_coordinate_ascent,
  annealing,
  continuous_perturbation,
  product_ones,
};

const char* to_string(SearchStrategy s);
SearchStrategy strategy_from_string(const std::string& name);

/// Search over order-m tensors with uniform axis length n, maximizing
/// ell_r(a) / moment_p(a). budget counts objective evaluations per restart.
struct SearchConfig {
  int m = 1;
  int n = 2;
  double r = 1.0;
  double p = 1.0;
  SearchStrategy strategy = SearchStrategy::exhaustive_signs;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  int restarts = 1;
};

struct SearchResult {
  CoefficientTensor best_tensor;
  double best_ratio = 0.0;
  std::vector<std::pair<std::uint64_t, double>> trace;
  SearchConfig config;
};

/// The ratio the searches maximize, recomputable independently of any
/// search state. p = 1 on integer tensors runs through the exact engine.
double objective_ratio(const CoefficientTensor& a, double r, double p,
                       const RunOptions& opts = {}, const MomentFallback& fb = {});

SearchResult maximize_ratio(const SearchConfig& cfg, const RunOptions& opts = {});

/// Minimizes the p = 1 Khinchin ratio over unit ell_2 vectors of length n by
/// seeded perturbation descent (multistart: the sparse two-coordinate
/// extremal, the flat vector, and random unit starts). The result upper
/// bounds the finite-n constant A_1(n) >= 1/sqrt(2).
SearchResult estimate_A1(int n, std::uint64_t budget, std::uint64_t seed,
                         const RunOptions& opts = {});

/// Runs maximize_ratio for each n and fits log(best ratio) against log n.
FitResult exponent_sweep(int m, double r, double p, const std::vector<int>& n_list,
                         SearchStrategy strategy, std::uint64_t budget,
                         std::uint64_t seed, const RunOptions& opts = {});

}  // namespace chaoslab
