#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "chaoslab/chaos.hpp"
#include "chaoslab/constructions.hpp"
#include "test_helpers.hpp"

using namespace chaoslab;

namespace {

std::multiset<std::pair<std::vector<std::int32_t>, double>> mono_set(
    const SparseMultilinearForm& f) {
  std::multiset<std::pair<std::vector<std::int32_t>, double>> s;
  for (const Monomial& t : f.monomials()) s.insert({t.indices, t.coeff});
  return s;
}

}  // namespace

TEST_CASE("R_2 and R_3 match their displayed monomials") {
  SparseMultilinearForm r2 = build_rm(2);
  CHECK(mono_set(r2) ==
        mono_set(SparseMultilinearForm(
            2, {{{1, 1}, 1}, {{1, 2}, 1}, {{2, 1}, 1}, {{2, 2}, -1}})));

  // (x1+x2)(R_2 on coords 1,2) + (x1-x2)(R_2 on coords 3,4), expanded.
  std::vector<Monomial> want;
  const int base[4][3] = {{1, 1, +1}, {1, 2, +1}, {2, 1, +1}, {2, 2, -1}};
  for (const auto& t : base) {
    for (int lead = 1; lead <= 2; ++lead) {
      want.push_back({{lead, t[0], t[1]}, static_cast<double>(t[2])});
      want.push_back({{lead, t[0] + 2, t[1] + 2},
                      static_cast<double>(lead == 1 ? t[2] : -t[2])});
    }
  }
  CHECK(mono_set(build_rm(3)) == mono_set(SparseMultilinearForm(3, want)));
}

TEST_CASE("R_m structural counts for m = 2..6") {
  for (int m = 2; m <= 6; ++m) {
    SparseMultilinearForm f = build_rm(m);
    CHECK(static_cast<std::int64_t>(f.monomials().size()) ==
          (std::int64_t{1} << (2 * m - 2)));
    for (const Monomial& t : f.monomials())
      CHECK(std::abs(t.coeff) == 1.0);
    CHECK(static_cast<int>(last_variable_coordinates(f).size()) == (1 << (m - 1)));

    std::map<int, int> uses;
    for (const Monomial& t : f.monomials())
      ++uses[t.indices[static_cast<std::size_t>(m) - 1]];
    for (const auto& kv : uses) CHECK(kv.second == (1 << (m - 1)));

    // Coordinate blocks follow the doubling recursion: 2, 4, ..., 2^{m-1}, 2^{m-1}.
    CHECK(f.var_degree(0) == 2);
    for (int j = 1; j < m - 1; ++j) CHECK(f.var_degree(j) == (2 << j));
    CHECK(f.var_degree(m - 1) == (1 << (m - 1)));
  }
  CHECK_THROWS_AS(build_rm(1), Error);
  CHECK_THROWS_AS(build_rm(7), Error);
}

TEST_CASE("R_m sup-norm certification") {
  for (int m = 2; m <= 4; ++m)
    CHECK(sup_norm(build_rm(m)).value == static_cast<double>(1 << (m - 1)));
}

TEST_CASE("R_{m+1} slices: 2^m unimodular entries, unit moment") {
  for (int m = 1; m <= 3; ++m) {
    SparseMultilinearForm f = build_rm(m + 1);
    CoefficientTensor tensor = form_to_tensor(f);
    const int last = tensor.dim(tensor.order() - 1);
    CHECK(last == (1 << m));
    for (int k = 0; k < last; ++k) {
      CoefficientTensor slice = slice_last(tensor, k);
      int nonzero = 0;
      for (std::int64_t e = 0; e < slice.size(); ++e) {
        if (slice.flat(e) != 0.0) {
          ++nonzero;
          CHECK(std::abs(slice.flat(e)) == 1.0);
        }
      }
      CHECK(nonzero == (1 << m));
      MomentResult mom = moment_p_exact(slice, 1.0);
      REQUIRE(mom.exact_power.has_value());
      CHECK(*mom.exact_power == 1);
    }
  }
}

TEST_CASE("ksz_random shape and determinism") {
  SparseMultilinearForm f = ksz_random(1, 3, 99);
  CHECK(f.order() == 1);
  CHECK(f.monomials().size() == 3);
  for (const Monomial& t : f.monomials()) CHECK(std::abs(t.coeff) == 1.0);

  SparseMultilinearForm g = ksz_random(2, 4, 5);
  SparseMultilinearForm h = ksz_random(2, 4, 5);
  CHECK(mono_set(g) == mono_set(h));
  CHECK(g.monomials().size() == 16);
  CHECK(g.var_degree(0) == 4);
  CHECK(g.var_degree(1) == 4);

  // Sixteen distinct 2x2 sign matrices exist; a seed sweep finds a norm-2 one.
  bool found_hadamard = false;
  for (std::uint64_t s = 0; s < 64 && !found_hadamard; ++s)
    found_hadamard = sup_norm(ksz_random(2, 2, s)).value == 2.0;
  CHECK(found_hadamard);
}

TEST_CASE("ksz_search certificates") {
  for (int n : {2, 5, 9}) {
    KszCertificate cert = ksz_search(1, n, 20, 7);
    CHECK(cert.certified_norm == static_cast<double>(n));
    CHECK(cert.k_hat == doctest::Approx(1.0).epsilon(1e-14));
  }

  // Only 16 sign matrices exist at m = n = 2: the nonsingular half have
  // norm 2, the rest 4, so a modest budget certifies 2 = sqrt(2) n^{3/2}/2.
  KszCertificate tiny = ksz_search(2, 2, 32, 3);
  CHECK(tiny.certified_norm == 2.0);
  CHECK(tiny.k_hat == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  KszCertificate cert = ksz_search(2, 4, 60, 11);
  CHECK(cert.trials_run == 60);
  // Independent recomputation reproduces the certified norm exactly.
  CHECK(sup_norm(cert.form).value == cert.certified_norm);
  CHECK(cert.k_hat ==
        doctest::Approx(cert.certified_norm / std::pow(4.0, 1.5)).epsilon(1e-14));

  // The witness of the recomputation attains the certified value.
  NormCertificate nc = sup_norm(cert.form);
  std::vector<std::vector<double>> x;
  for (const auto& var : nc.witness) {
    std::vector<double> v;
    for (std::int8_t sg : var) v.push_back(sg);
    x.push_back(std::move(v));
  }
  CHECK(std::abs(evaluate(cert.form, x)) == cert.certified_norm);

  // Nested trial seeds: more budget can only improve the minimum.
  KszCertificate small = ksz_search(2, 4, 15, 11);
  CHECK(cert.certified_norm <= small.certified_norm);

  // Determinism, including across thread counts.
  RunOptions t1, t3;
  t1.threads = 1;
  t3.threads = 3;
  KszCertificate a = ksz_search(2, 4, 25, 13, t1);
  KszCertificate b = ksz_search(2, 4, 25, 13, t3);
  CHECK(a.certified_norm == b.certified_norm);
  CHECK(a.best_trial == b.best_trial);
  CHECK(mono_set(a.form) == mono_set(b.form));
}
