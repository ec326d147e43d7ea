#include <doctest.h>

#include <cmath>

#include "chaoslab/search.hpp"
#include "test_helpers.hpp"

using namespace chaoslab;

namespace {

// Independent brute force over every +-1 tensor of the given shape.
double brute_force_best_ratio(int m, int n, double r, double p) {
  std::vector<int> dims(static_cast<std::size_t>(m), n);
  std::int64_t cells = 1;
  for (int j = 0; j < m; ++j) cells *= n;
  double best = 0.0;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << cells); ++u) {
    std::vector<double> e(static_cast<std::size_t>(cells));
    for (std::int64_t i = 0; i < cells; ++i)
      e[static_cast<std::size_t>(i)] = (u >> i) & 1u ? -1.0 : 1.0;
    CoefficientTensor a(dims, e);
    best = std::max(best, ell_r_norm(a, r) / testutil::naive_moment(a, p));
  }
  return best;
}

}  // namespace

TEST_CASE("exhaustive search matches brute force") {
  SearchConfig cfg;
  cfg.m = 1;
  cfg.n = 2;
  cfg.strategy = SearchStrategy::exhaustive_signs;
  SearchResult res = maximize_ratio(cfg);
  CHECK(res.best_ratio == doctest::Approx(2.0).epsilon(1e-13));
  // Every sign vector ties at ratio 2; the lex rule keeps all-ones.
  CHECK(res.best_tensor.flat(0) == 1.0);
  CHECK(res.best_tensor.flat(1) == 1.0);

  cfg.m = 2;
  cfg.n = 2;
  SearchResult res22 = maximize_ratio(cfg);
  const double brute = brute_force_best_ratio(2, 2, 1.0, 1.0);
  CHECK(res22.best_ratio == doctest::Approx(brute).epsilon(1e-12));
  // All-ones attains the ceiling 2^{m/2} n^{m/2} = 4 here.
  CHECK(res22.best_ratio == doctest::Approx(4.0).epsilon(1e-12));

  cfg.m = 1;
  cfg.n = 3;
  cfg.r = 1.3;
  SearchResult res3 = maximize_ratio(cfg);
  CHECK(res3.best_ratio ==
        doctest::Approx(brute_force_best_ratio(1, 3, 1.3, 1.0)).epsilon(1e-12));

  cfg.n = 30;
  CHECK_THROWS_AS(maximize_ratio(cfg), BudgetError);
}

TEST_CASE("search results recompute and respect ceilings") {
  for (SearchStrategy strat :
       {SearchStrategy::exhaustive_signs, SearchStrategy::sign_coordinate_ascent,
        SearchStrategy::annealing, SearchStrategy::product_ones}) {
    SearchConfig cfg;
    cfg.m = 2;
    cfg.n = 3;
    cfg.r = 1.0;
    cfg.p = 1.0;
    cfg.strategy = strat;
    cfg.budget = 60;
    cfg.seed = 21;
    cfg.restarts = 2;
    if (strat == SearchStrategy::exhaustive_signs) continue;  // 2^9 fine but slower
    SearchResult res = maximize_ratio(cfg);
    CHECK(res.best_ratio ==
          doctest::Approx(objective_ratio(res.best_tensor, cfg.r, cfg.p)).epsilon(1e-12));
    const double ceiling = std::pow(2.0, 1.0) * std::pow(3.0, 2.0 * (1.0 - 0.5));
    CHECK(res.best_ratio <= ceiling * (1 + 1e-12));
  }

  // r >= 2 ceiling is the dimension-free 2^{m/r}.
  SearchConfig cfg;
  cfg.m = 1;
  cfg.n = 4;
  cfg.r = 2.0;
  cfg.strategy = SearchStrategy::sign_coordinate_ascent;
  cfg.budget = 40;
  cfg.seed = 3;
  SearchResult res = maximize_ratio(cfg);
  CHECK(res.best_ratio <= std::pow(2.0, 0.5) * (1 + 1e-12));
}

TEST_CASE("objective is invariant under sign symmetries") {
  CoefficientTensor a = testutil::random_int_tensor(4000, 2, 3, 3);
  const double base = objective_ratio(a, 1.5, 1.0);

  std::vector<double> neg(a.entries().begin(), a.entries().end());
  for (double& x : neg) x = -x;
  CHECK(objective_ratio(CoefficientTensor(a.dims(), neg), 1.5, 1.0) ==
        doctest::Approx(base).epsilon(1e-12));

  const int n0 = a.dim(0);
  const std::int64_t slab = a.size() / n0;
  std::vector<double> flip(a.entries().begin(), a.entries().end());
  for (std::int64_t k = 0; k < slab; ++k) flip[static_cast<std::size_t>(k)] *= -1.0;
  CHECK(objective_ratio(CoefficientTensor(a.dims(), flip), 1.5, 1.0) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("determinism and traces") {
  SearchConfig cfg;
  cfg.m = 1;
  cfg.n = 6;
  cfg.r = 1.0;
  cfg.strategy = SearchStrategy::annealing;
  cfg.budget = 120;
  cfg.seed = 99;
  cfg.restarts = 3;
  RunOptions t1, t3;
  t1.threads = 1;
  t3.threads = 3;
  SearchResult a = maximize_ratio(cfg, t1);
  SearchResult b = maximize_ratio(cfg, t3);
  CHECK(a.best_ratio == b.best_ratio);
  CHECK(a.trace == b.trace);
  for (std::int64_t i = 0; i < a.best_tensor.size(); ++i)
    CHECK(a.best_tensor.flat(i) == b.best_tensor.flat(i));

  for (std::size_t i = 1; i < a.trace.size(); ++i)
    CHECK(a.trace[i].second >= a.trace[i - 1].second);

  cfg.strategy = SearchStrategy::sign_coordinate_ascent;
  SearchResult c = maximize_ratio(cfg);
  for (std::size_t i = 1; i < c.trace.size(); ++i)
    CHECK(c.trace[i].second > c.trace[i - 1].second);
}

TEST_CASE("product-ones closed form") {
  SearchConfig cfg;
  cfg.m = 2;
  cfg.n = 3;
  cfg.r = 1.0;
  cfg.strategy = SearchStrategy::product_ones;
  cfg.budget = 0;
  SearchResult res = maximize_ratio(cfg);
  for (std::int64_t i = 0; i < res.best_tensor.size(); ++i)
    CHECK(res.best_tensor.flat(i) == 1.0);
  // ratio = n^m / (E|S_n|)^m with E|S_3| = 3/2.
  CHECK(res.best_ratio == doctest::Approx(9.0 / 2.25).epsilon(1e-13));
  // And the engine agrees.
  CHECK(res.best_ratio ==
        doctest::Approx(objective_ratio(res.best_tensor, 1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("estimate_A1") {
  SearchResult n1 = estimate_A1(1, 100, 5);
  CHECK(n1.best_ratio == doctest::Approx(1.0).epsilon(1e-13));

  SearchResult n2 = estimate_A1(2, 500, 5);
  CHECK(n2.best_ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  SearchResult n4 = estimate_A1(4, 2000, 5);
  CHECK(n4.best_ratio >= 1.0 / std::sqrt(2.0) - 1e-9);
  CHECK(n4.best_ratio <= 0.75 + 1e-12);

  // Deterministic.
  SearchResult again = estimate_A1(4, 2000, 5);
  CHECK(n4.best_ratio == again.best_ratio);

  CHECK_THROWS_AS(estimate_A1(0, 10, 1), Error);
}

TEST_CASE("exponent_sweep") {
  // Synthetic power law via the public fit path.
  std::vector<std::pair<double, double>> pts;
  for (double n : {2.0, 4.0, 8.0}) pts.emplace_back(n, std::pow(n, 0.5));
  CHECK(fit_exponent(pts).slope == doctest::Approx(0.5).epsilon(1e-9));

  FitResult m1 = exponent_sweep(1, 1.0, 1.0, {2, 4, 8, 16, 32, 64},
                                SearchStrategy::product_ones, 0, 7);
  CHECK(m1.slope > 0.4);
  CHECK(m1.slope < 0.6);

  FitResult m2 = exponent_sweep(2, 1.0, 1.0, {2, 3, 4, 5, 6, 7, 8, 9, 10},
                                SearchStrategy::product_ones, 0, 7);
  CHECK(m2.slope > 0.85);
  CHECK(m2.slope < 1.15);

  CHECK_THROWS_AS(exponent_sweep(1, 1.0, 1.0, {2, 4}, SearchStrategy::product_ones, 0, 7),
                  Error);
}
