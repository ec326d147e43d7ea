#include "chaoslab/constructions.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>

#include "chaoslab/parallel.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

namespace {

struct RmData {
  std::vector<Monomial> monomials;
  std::vector<int> coord_counts;  // coordinates used per variable
};

RmData rm_recursion(int m) {
  if (m == 2) {
    RmData r;
    r.coord_counts = {2, 2};
    r.monomials = {{{1, 1}, +1.0}, {{1, 2}, +1.0}, {{2, 1}, +1.0}, {{2, 2}, -1.0}};
    return r;
  }
  const RmData prev = rm_recursion(m - 1);
  RmData r;
  r.coord_counts.assign(static_cast<std::size_t>(m), 0);
  r.coord_counts[0] = 2;
  for (int j = 1; j < m; ++j)
    r.coord_counts[static_cast<std::size_t>(j)] =
        2 * prev.coord_counts[static_cast<std::size_t>(j) - 1];
  r.monomials.reserve(prev.monomials.size() * 4);
  for (const Monomial& t : prev.monomials) {
    for (int lead = 1; lead <= 2; ++lead) {
      // (x_1 + x_2) branch: the previous form verbatim.
      Monomial a;
      a.indices.push_back(lead);
      a.indices.insert(a.indices.end(), t.indices.begin(), t.indices.end());
      a.coeff = t.coeff;
      r.monomials.push_back(std::move(a));
      // (x_1 - x_2) branch: every variable shifted past the block the
      // previous form occupies there.
      Monomial b;
      b.indices.push_back(lead);
      for (int j = 0; j < m - 1; ++j)
        b.indices.push_back(t.indices[static_cast<std::size_t>(j)] +
                            prev.coord_counts[static_cast<std::size_t>(j)]);
      b.coeff = (lead == 1) ? t.coeff : -t.coeff;
      r.monomials.push_back(std::move(b));
    }
  }
  return r;
}

void check(bool cond, const char* what) {
  if (!cond) throw Error(std::string("R_m construction invariant failed: ") + what);
}

}  // namespace

SparseMultilinearForm build_rm(int m) {
  if (m < 2 || m > 6) throw Error("build_rm supports 2 <= m <= 6");
  RmData data = rm_recursion(m);
  SparseMultilinearForm f(m, std::move(data.monomials));

  const std::int64_t want_count = std::int64_t{1} << (2 * m - 2);
  check(static_cast<std::int64_t>(f.monomials().size()) == want_count,
        "monomial count != 2^(2m-2)");
  for (const Monomial& t : f.monomials())
    check(t.coeff == 1.0 || t.coeff == -1.0, "coefficient not +-1");
  for (int j = 0; j < m; ++j)
    check(f.var_degree(j) == data.coord_counts[static_cast<std::size_t>(j)],
          "coordinate block mismatch");

  const std::set<int> last = last_variable_coordinates(f);
  const int want_last = 1 << (m - 1);
  check(static_cast<int>(last.size()) == want_last,
        "distinct last-variable coordinates != 2^(m-1)");
  std::map<int, int> uses;
  for (const Monomial& t : f.monomials())
    ++uses[t.indices[static_cast<std::size_t>(m) - 1]];
  for (const auto& [coord, cnt] : uses)
    check(cnt == want_last, "last-variable coordinate use count != 2^(m-1)");

  // Norm certificate where the vertex enumeration stays tiny.
  if (m <= 4) {
    NormCertificate cert = sup_norm(f);
    check(cert.value == static_cast<double>(1 << (m - 1)), "sup-norm != 2^(m-1)");
  }
  return f;
}

SparseMultilinearForm ksz_random(int m, int n, std::uint64_t seed) {
  if (m < 1 || m > kMaxOrder) throw Error("ksz_random order out of range");
  if (n < 1) throw Error("ksz_random needs n >= 1");
  double cells = std::pow(static_cast<double>(n), m);
  if (cells > static_cast<double>(kMaxEntries)) throw Error("ksz grid too large");
  const std::int64_t total = static_cast<std::int64_t>(cells + 0.5);

  const CounterRng rng(seed);
  std::vector<Monomial> monomials;
  monomials.reserve(static_cast<std::size_t>(total));
  for (std::int64_t e = 0; e < total; ++e) {
    Monomial t;
    t.indices.assign(static_cast<std::size_t>(m), 0);
    std::int64_t rem = e;
    for (int j = m - 1; j >= 0; --j) {
      t.indices[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(rem % n) + 1;
      rem /= n;
    }
    t.coeff = rng.sign_bit(0x4B5A, static_cast<std::uint64_t>(e)) < 0 ? -1.0 : 1.0;
    monomials.push_back(std::move(t));
  }
  return SparseMultilinearForm(m, std::move(monomials));
}

KszCertificate ksz_search(int m, int n, std::uint64_t budget, std::uint64_t seed,
                          const RunOptions& opts) {
  if (budget < 1) throw Error("ksz_search needs budget >= 1");
  // Vertex feasibility check up front so the error fires before any work.
  {
    SparseMultilinearForm probe = ksz_random(m, n, derive_seed(seed, 0));
    sup_norm(probe, opts);
  }

  struct Trial {
    double norm = 0.0;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(budget));
  RunOptions inner = opts;
  inner.threads = 1;  // parallelism lives at the trial level
  for_each_chunk(budget, opts.threads, [&](std::uint64_t t) {
    SparseMultilinearForm f = ksz_random(m, n, derive_seed(seed, t));
    trials[static_cast<std::size_t>(t)].norm = sup_norm(f, inner).value;
  });

  std::uint64_t best = 0;
  for (std::uint64_t t = 1; t < budget; ++t)
    if (trials[static_cast<std::size_t>(t)].norm < trials[static_cast<std::size_t>(best)].norm)
      best = t;

  KszCertificate cert{ksz_random(m, n, derive_seed(seed, best))};
  cert.certified_norm = trials[static_cast<std::size_t>(best)].norm;
  cert.k_hat = cert.certified_norm /
               std::pow(static_cast<double>(n), 0.5 * (m + 1));
  cert.budget = budget;
  cert.seed = seed;
  cert.trials_run = budget;
  cert.best_trial = best;
  return cert;
}

}  // namespace chaoslab
