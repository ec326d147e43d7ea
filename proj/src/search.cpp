#include "chaoslab/search.hpp"

#include <algorithm>
#include <cmath>

#include "chaoslab/parallel.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

const char* to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::exhaustive_signs: return "exhaustive-signs";
    case SearchStrategy::sign_coordinate_ascent: return "sign-coordinate-ascent";
    case SearchStrategy::annealing: return "annealing";
    case SearchStrategy::continuous_perturbation: return "continuous-perturbation";
    case SearchStrategy::product_ones: return "product-ones";
  }
  return "?";
}

SearchStrategy strategy_from_string(const std::string& name) {
  if (name == "exhaustive-signs") return SearchStrategy::exhaustive_signs;
  if (name == "sign-coordinate-ascent") return SearchStrategy::sign_coordinate_ascent;
  if (name == "annealing") return SearchStrategy::annealing;
  if (name == "continuous-perturbation") return SearchStrategy::continuous_perturbation;
  if (name == "product-ones") return SearchStrategy::product_ones;
  throw Error("unknown search strategy: " + name);
}

double objective_ratio(const CoefficientTensor& a, double r, double p,
                       const RunOptions& opts, const MomentFallback& fb) {
  const double mom = moment_p_auto(a, p, fb.samples, fb.seed, opts).value;
  if (mom == 0.0) throw Error("objective undefined: zero moment");
  return ell_r_norm(a, r) / mom;
}

namespace {

std::vector<int> uniform_shape(int m, int n) {
  if (m < 1 || m > kMaxOrder) throw Error("search order out of range");
  if (n < 1) throw Error("search needs n >= 1");
  return std::vector<int>(static_cast<std::size_t>(m), n);
}

std::int64_t cells_of(int m, int n) {
  std::int64_t total = 1;
  for (int j = 0; j < m; ++j) {
    total *= n;
    if (total > kMaxEntries) throw Error("search tensor too large");
  }
  return total;
}

struct Candidate {
  bool valid = false;
  double ratio = 0.0;
  std::vector<double> entries;
  std::uint64_t step = 0;
};

void consider(Candidate& best, double ratio, const std::vector<double>& entries,
              std::uint64_t step) {
  if (!best.valid || ratio > best.ratio) {
    best = Candidate{true, ratio, entries, step};
  }
}

// Common random numbers for MC-mode comparisons within one run.
MomentFallback fallback_for(const SearchConfig& cfg) {
  MomentFallback fb;
  fb.seed = derive_seed(cfg.seed, 0xC0FFEE);
  return fb;
}

SearchResult exhaustive_search(const SearchConfig& cfg, const RunOptions& opts) {
  const std::int64_t cells = cells_of(cfg.m, cfg.n);
  if (cells > 24)
    throw BudgetError("exhaustive-signs sign space exceeds 2^24 patterns");
  const std::vector<int> shape = uniform_shape(cfg.m, cfg.n);
  const std::uint64_t space = std::uint64_t{1} << cells;
  const MomentFallback fb = fallback_for(cfg);

  const int chunk_bits = std::max(0, std::min(4, static_cast<int>(cells) - 6));
  const std::uint64_t n_chunks = std::uint64_t{1} << chunk_bits;
  const std::uint64_t span = space / n_chunks;

  struct ChunkBest {
    Candidate best;
    std::vector<std::pair<std::uint64_t, double>> trace;
  };
  std::vector<ChunkBest> parts(static_cast<std::size_t>(n_chunks));
  RunOptions inner = opts;
  inner.threads = 1;
  for_each_chunk(n_chunks, opts.threads, [&](std::uint64_t c) {
    ChunkBest part;
    std::vector<double> entries(static_cast<std::size_t>(cells));
    for (std::uint64_t u = c * span; u < (c + 1) * span; ++u) {
      // Entry 0 owns the top bit so ascending u is ascending lexicographic
      // order (+1 before -1); first strict improvement keeps the lex-least.
      for (std::int64_t i = 0; i < cells; ++i)
        entries[static_cast<std::size_t>(i)] =
            (u >> (cells - 1 - i)) & 1u ? -1.0 : 1.0;
      CoefficientTensor a(shape, entries);
      const double ratio = objective_ratio(a, cfg.r, cfg.p, inner, fb);
      if (!part.best.valid || ratio > part.best.ratio) {
        consider(part.best, ratio, entries, u);
        part.trace.emplace_back(u, ratio);
      }
    }
    parts[static_cast<std::size_t>(c)] = std::move(part);
  });

  Candidate best;
  std::vector<std::pair<std::uint64_t, double>> trace;
  for (const auto& part : parts) {
    if (part.best.valid && (!best.valid || part.best.ratio > best.ratio)) {
      best = part.best;
    }
    for (const auto& [step, ratio] : part.trace)
      if (trace.empty() || ratio > trace.back().second) trace.emplace_back(step, ratio);
  }
  return SearchResult{CoefficientTensor(shape, best.entries), best.ratio,
                      std::move(trace), cfg};
}

std::vector<double> random_signs(std::int64_t cells, const CounterRng& rng) {
  std::vector<double> e(static_cast<std::size_t>(cells));
  for (std::int64_t i = 0; i < cells; ++i)
    e[static_cast<std::size_t>(i)] =
        rng.sign_bit(1, static_cast<std::uint64_t>(i)) < 0 ? -1.0 : 1.0;
  return e;
}

SearchResult restart_search(const SearchConfig& cfg, const RunOptions& opts,
                            bool anneal) {
  const std::vector<int> shape = uniform_shape(cfg.m, cfg.n);
  const std::int64_t cells = cells_of(cfg.m, cfg.n);
  const MomentFallback fb = fallback_for(cfg);
  const int restarts = std::max(1, cfg.restarts);

  struct RestartOut {
    Candidate best;
    std::vector<std::pair<std::uint64_t, double>> trace;
  };
  std::vector<RestartOut> outs(static_cast<std::size_t>(restarts));
  RunOptions inner = opts;
  inner.threads = 1;

  for_each_chunk(static_cast<std::uint64_t>(restarts), opts.threads, [&](std::uint64_t rix) {
    const CounterRng rng(derive_seed(cfg.seed, rix));
    RestartOut out;
    std::vector<double> cur = random_signs(cells, rng);
    auto eval = [&](const std::vector<double>& e) {
      return objective_ratio(CoefficientTensor(shape, e), cfg.r, cfg.p, inner, fb);
    };
    double cur_ratio = eval(cur);
    std::uint64_t evals = 1;
    consider(out.best, cur_ratio, cur, evals);
    out.trace.emplace_back(evals, cur_ratio);

    if (anneal) {
      const double t0 = std::max(1.0, cur_ratio);
      const double t1 = 1e-3 * t0;
      for (std::uint64_t step = 0; evals < cfg.budget; ++step) {
        const double frac = cfg.budget > 1
                                ? static_cast<double>(step) / static_cast<double>(cfg.budget)
                                : 1.0;
        const double temp = t0 * std::pow(t1 / t0, frac);
        const std::int64_t flip =
            static_cast<std::int64_t>(rng.word(2, 2 * step) % static_cast<std::uint64_t>(cells));
        cur[static_cast<std::size_t>(flip)] *= -1.0;
        const double ratio = eval(cur);
        ++evals;
        const bool accept = ratio >= cur_ratio ||
                            rng.uniform01(2, 2 * step + 1) <
                                std::exp((ratio - cur_ratio) / temp);
        if (accept) {
          cur_ratio = ratio;
          if (!out.best.valid || ratio > out.best.ratio) {
            consider(out.best, ratio, cur, evals);
            out.trace.emplace_back(evals, ratio);
          }
        } else {
          cur[static_cast<std::size_t>(flip)] *= -1.0;
        }
      }
    } else {
      // Greedy single-flip ascent until a full sweep stalls.
      bool improved = true;
      while (improved && evals < cfg.budget) {
        improved = false;
        for (std::int64_t i = 0; i < cells && evals < cfg.budget; ++i) {
          cur[static_cast<std::size_t>(i)] *= -1.0;
          const double ratio = eval(cur);
          ++evals;
          if (ratio > cur_ratio) {
            cur_ratio = ratio;
            improved = true;
            consider(out.best, ratio, cur, evals);
            out.trace.emplace_back(evals, ratio);
          } else {
            cur[static_cast<std::size_t>(i)] *= -1.0;
          }
        }
      }
    }
    outs[static_cast<std::size_t>(rix)] = std::move(out);
  });

  Candidate best;
  std::vector<std::pair<std::uint64_t, double>> trace;
  for (int rix = 0; rix < restarts; ++rix) {
    const auto& out = outs[static_cast<std::size_t>(rix)];
    const std::uint64_t offset = static_cast<std::uint64_t>(rix) * std::max<std::uint64_t>(cfg.budget, 1);
    for (const auto& [step, ratio] : out.trace)
      if (trace.empty() || ratio > trace.back().second)
        trace.emplace_back(offset + step, ratio);
    if (out.best.valid && (!best.valid || out.best.ratio > best.ratio)) best = out.best;
  }
  return SearchResult{CoefficientTensor(shape, best.entries), best.ratio,
                      std::move(trace), cfg};
}

void normalize_l2(std::vector<double>& e) {
  double q = 0.0;
  for (double x : e) q += x * x;
  const double s = std::sqrt(q);
  if (s > 0.0)
    for (double& x : e) x /= s;
}

SearchResult continuous_search(const SearchConfig& cfg, const RunOptions& opts) {
  const std::vector<int> shape = uniform_shape(cfg.m, cfg.n);
  const std::int64_t cells = cells_of(cfg.m, cfg.n);
  const MomentFallback fb = fallback_for(cfg);
  const int restarts = std::max(1, cfg.restarts);

  std::vector<Candidate> outs(static_cast<std::size_t>(restarts));
  std::vector<std::vector<std::pair<std::uint64_t, double>>> traces(
      static_cast<std::size_t>(restarts));
  RunOptions inner = opts;
  inner.threads = 1;

  for_each_chunk(static_cast<std::uint64_t>(restarts), opts.threads, [&](std::uint64_t rix) {
    const CounterRng rng(derive_seed(cfg.seed, 0x1000 + rix));
    std::vector<double> cur(static_cast<std::size_t>(cells), 1.0);
    if (rix > 0)
      for (std::int64_t i = 0; i < cells; ++i)
        cur[static_cast<std::size_t>(i)] = rng.normal(3, static_cast<std::uint64_t>(i));
    normalize_l2(cur);
    auto eval = [&](const std::vector<double>& e) {
      return objective_ratio(CoefficientTensor(shape, e), cfg.r, cfg.p, inner, fb);
    };
    double cur_ratio = eval(cur);
    std::uint64_t evals = 1;
    Candidate best;
    consider(best, cur_ratio, cur, evals);
    traces[static_cast<std::size_t>(rix)].emplace_back(evals, cur_ratio);

    std::vector<double> prop(static_cast<std::size_t>(cells));
    for (std::uint64_t step = 0; evals < cfg.budget; ++step) {
      const double frac = cfg.budget > 1
                              ? static_cast<double>(step) / static_cast<double>(cfg.budget)
                              : 1.0;
      const double sigma = 0.5 * std::pow(2e-4, frac);
      for (std::int64_t i = 0; i < cells; ++i)
        prop[static_cast<std::size_t>(i)] =
            cur[static_cast<std::size_t>(i)] +
            sigma * rng.normal(4, step * static_cast<std::uint64_t>(cells) +
                                      static_cast<std::uint64_t>(i));
      normalize_l2(prop);
      const double ratio = eval(prop);
      ++evals;
      if (ratio > cur_ratio) {
        cur.swap(prop);
        cur_ratio = ratio;
        consider(best, ratio, cur, evals);
        traces[static_cast<std::size_t>(rix)].emplace_back(evals, ratio);
      }
    }
    outs[static_cast<std::size_t>(rix)] = std::move(best);
  });

  Candidate best;
  std::vector<std::pair<std::uint64_t, double>> trace;
  for (int rix = 0; rix < restarts; ++rix) {
    const std::uint64_t offset = static_cast<std::uint64_t>(rix) * std::max<std::uint64_t>(cfg.budget, 1);
    for (const auto& [step, ratio] : traces[static_cast<std::size_t>(rix)])
      if (trace.empty() || ratio > trace.back().second)
        trace.emplace_back(offset + step, ratio);
    const auto& out = outs[static_cast<std::size_t>(rix)];
    if (out.valid && (!best.valid || out.ratio > best.ratio)) best = out;
  }
  return SearchResult{CoefficientTensor(shape, best.entries), best.ratio,
                      std::move(trace), cfg};
}

SearchResult product_ones_result(const SearchConfig& cfg, const RunOptions& opts) {
  const std::vector<int> shape = uniform_shape(cfg.m, cfg.n);
  const std::int64_t cells = cells_of(cfg.m, cfg.n);
  CoefficientTensor ones(shape, std::vector<double>(static_cast<std::size_t>(cells), 1.0));
  double ratio;
  if (cfg.p == 1.0) {
    // Product structure factorizes the moment: E|S| = prod_j E|S_{n_j}|.
    const ExactDyadic moment = abs_sign_sum_expectation(cfg.n).pow(cfg.m);
    ratio = std::pow(static_cast<double>(cfg.n), static_cast<double>(cfg.m) / cfg.r) /
            moment.to_double();
  } else {
    ratio = objective_ratio(ones, cfg.r, cfg.p, opts, fallback_for(cfg));
  }
  return SearchResult{std::move(ones), ratio, {{0, ratio}}, cfg};
}

}  // namespace

SearchResult maximize_ratio(const SearchConfig& cfg, const RunOptions& opts) {
  if (!(cfg.r > 0.0) || !(cfg.p > 0.0)) throw Error("search needs r, p > 0");
  switch (cfg.strategy) {
    case SearchStrategy::exhaustive_signs: return exhaustive_search(cfg, opts);
    case SearchStrategy::sign_coordinate_ascent: return restart_search(cfg, opts, false);
    case SearchStrategy::annealing: return restart_search(cfg, opts, true);
    case SearchStrategy::continuous_perturbation: return continuous_search(cfg, opts);
    case SearchStrategy::product_ones: return product_ones_result(cfg, opts);
  }
  throw Error("unknown strategy");
}

SearchResult estimate_A1(int n, std::uint64_t budget, std::uint64_t seed,
                         const RunOptions& opts) {
  if (n < 1) throw Error("estimate_A1 needs n >= 1");
  const std::vector<int> shape{n};
  auto ratio_of = [&](const std::vector<double>& e) {
    return khinchin_ratio(CoefficientTensor(shape, e), 1.0, opts);
  };

  // Structured starts: the sparse two-coordinate extremal, the flat vector,
  // then seeded random directions.
  std::vector<std::vector<double>> starts;
  {
    std::vector<double> sparse(static_cast<std::size_t>(n), 0.0);
    sparse[0] = 1.0;
    if (n >= 2) sparse[1] = 1.0;
    normalize_l2(sparse);
    starts.push_back(std::move(sparse));
    starts.emplace_back(static_cast<std::size_t>(n), 1.0);
    normalize_l2(starts.back());
    for (int s = 0; s < 3; ++s) {
      const CounterRng rng(derive_seed(seed, 0x41 + static_cast<std::uint64_t>(s)));
      std::vector<double> v(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = rng.normal(1, static_cast<std::uint64_t>(i));
      normalize_l2(v);
      starts.push_back(std::move(v));
    }
  }
  const std::uint64_t per_start = std::max<std::uint64_t>(1, budget / starts.size());

  Candidate best;
  std::vector<std::pair<std::uint64_t, double>> trace;
  std::uint64_t evals = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const CounterRng rng(derive_seed(seed, 0x100 + s));
    std::vector<double> cur = starts[s];
    double cur_ratio = ratio_of(cur);
    ++evals;
    if (!best.valid || cur_ratio < best.ratio) {
      best = Candidate{true, cur_ratio, cur, evals};
      trace.emplace_back(evals, cur_ratio);
    }
    std::vector<double> prop(cur.size());
    for (std::uint64_t step = 0; step + 1 < per_start; ++step) {
      const double frac = per_start > 1
                              ? static_cast<double>(step) / static_cast<double>(per_start)
                              : 1.0;
      const double sigma = 0.5 * std::pow(2e-4, frac);
      for (int i = 0; i < n; ++i)
        prop[static_cast<std::size_t>(i)] =
            cur[static_cast<std::size_t>(i)] +
            sigma * rng.normal(2, step * static_cast<std::uint64_t>(n) +
                                      static_cast<std::uint64_t>(i));
      normalize_l2(prop);
      const double ratio = ratio_of(prop);
      ++evals;
      if (ratio < cur_ratio) {
        cur.swap(prop);
        cur_ratio = ratio;
        if (ratio < best.ratio) {
          best = Candidate{true, ratio, cur, evals};
          trace.emplace_back(evals, ratio);
        }
      }
    }
  }

  SearchConfig cfg;
  cfg.m = 1;
  cfg.n = n;
  cfg.r = 2.0;
  cfg.p = 1.0;
  cfg.strategy = SearchStrategy::continuous_perturbation;
  cfg.budget = budget;
  cfg.seed = seed;
  cfg.restarts = static_cast<int>(starts.size());
  return SearchResult{CoefficientTensor(shape, best.entries), best.ratio,
                      std::move(trace), cfg};
}

FitResult exponent_sweep(int m, double r, double p, const std::vector<int>& n_list,
                         SearchStrategy strategy, std::uint64_t budget,
                         std::uint64_t seed, const RunOptions& opts) {
  std::vector<std::pair<double, double>> points;
  for (int n : n_list) {
    SearchConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.r = r;
    cfg.p = p;
    cfg.strategy = strategy;
    cfg.budget = budget;
    cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(n));
    try {
      points.emplace_back(static_cast<double>(n), maximize_ratio(cfg, opts).best_ratio);
    } catch (const BudgetError&) {
      // n too large for the chosen objective mode; skip it.
    }
  }
  if (points.size() < 3) throw Error("exponent sweep needs at least 3 feasible sizes");
  return fit_exponent(points);
}

}  // namespace chaoslab
