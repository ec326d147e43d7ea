#include "chaoslab/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "chaoslab/parallel.hpp"

namespace chaoslab {

namespace {

bool integral_value(double x) {
  return std::abs(x) <= 0x1.0p53 && x == std::nearbyint(x);
}

}  // namespace

SparseMultilinearForm::SparseMultilinearForm(int order, std::vector<Monomial> monomials)
    : order_(order), monomials_(std::move(monomials)) {
  if (order_ < 1) throw Error("form order must be at least 1");
  if (monomials_.empty()) throw Error("form needs at least one monomial");
  var_degrees_.assign(static_cast<std::size_t>(order_), 0);
  integer_coeffs_ = true;
  for (const Monomial& t : monomials_) {
    if (static_cast<int>(t.indices.size()) != order_)
      throw Error("monomial index tuple length must equal form order");
    if (!(t.coeff != 0.0) || !std::isfinite(t.coeff))
      throw Error("monomial coefficients must be nonzero and finite");
    if (!integral_value(t.coeff)) integer_coeffs_ = false;
    for (int j = 0; j < order_; ++j) {
      const std::int32_t i = t.indices[static_cast<std::size_t>(j)];
      if (i < 1 || i > (1 << 24)) throw Error("monomial index out of range");
      var_degrees_[static_cast<std::size_t>(j)] =
          std::max(var_degrees_[static_cast<std::size_t>(j)], static_cast<int>(i));
    }
  }
  std::vector<std::vector<std::int32_t>> tuples;
  tuples.reserve(monomials_.size());
  for (const Monomial& t : monomials_) tuples.push_back(t.indices);
  std::sort(tuples.begin(), tuples.end());
  if (std::adjacent_find(tuples.begin(), tuples.end()) != tuples.end())
    throw Error("duplicate monomial index tuple");
}

double evaluate(const SparseMultilinearForm& f,
                const std::vector<std::vector<double>>& x) {
  const int m = f.order();
  if (static_cast<int>(x.size()) != m)
    throw Error("evaluate needs one vector per variable");
  for (int j = 0; j < m; ++j)
    if (static_cast<int>(x[static_cast<std::size_t>(j)].size()) < f.var_degree(j))
      throw Error("vector too short for variable " + std::to_string(j + 1));
  double acc = 0.0;
  for (const Monomial& t : f.monomials()) {
    double term = t.coeff;
    for (int j = 0; j < m; ++j)
      term *= x[static_cast<std::size_t>(j)]
               [static_cast<std::size_t>(t.indices[static_cast<std::size_t>(j)] - 1)];
    acc += term;
  }
  return acc;
}

namespace {

inline std::uint64_t gray(std::uint64_t t) { return t ^ (t >> 1); }

// Enumeration plan: the variable with the largest coordinate range is
// optimized analytically; the others own one sign bit per coordinate.
struct VertexPlan {
  int linear_var = 0;
  std::vector<int> bit_var;    // bit -> variable
  std::vector<int> bit_coord;  // bit -> 0-based coordinate
  int total_bits = 0;
};

VertexPlan make_plan(const SparseMultilinearForm& f) {
  VertexPlan plan;
  const int m = f.order();
  int best = -1;
  for (int j = 0; j < m; ++j)
    if (f.var_degree(j) >= best) {
      best = f.var_degree(j);
      plan.linear_var = j;
    }
  for (int j = 0; j < m; ++j) {
    if (j == plan.linear_var) continue;
    for (int i = 0; i < f.var_degree(j); ++i) {
      plan.bit_var.push_back(j);
      plan.bit_coord.push_back(i);
    }
  }
  plan.total_bits = static_cast<int>(plan.bit_var.size());
  return plan;
}

template <class T>
struct VertexBest {
  bool valid = false;
  T value{};
  std::vector<std::int8_t> pattern;  // flattened signs, all variables in order
};

// Flattened sign pattern: variables ascending, coordinates ascending, with
// +1 encoded as 0 and -1 as 1 so numeric vector order is the lexicographic
// order in which all-plus is least.
template <class T>
std::vector<std::int8_t> flatten_pattern(const SparseMultilinearForm& f,
                                         const VertexPlan& plan,
                                         const std::vector<std::uint64_t>& bits_by_var,
                                         const std::vector<T>& lin) {
  std::vector<std::int8_t> out;
  for (int j = 0; j < f.order(); ++j) {
    const int nj = f.var_degree(j);
    if (j == plan.linear_var) {
      for (int i = 0; i < nj; ++i)
        out.push_back(lin[static_cast<std::size_t>(i)] < T(0) ? 1 : 0);
    } else {
      for (int i = 0; i < nj; ++i)
        out.push_back(static_cast<std::int8_t>(
            (bits_by_var[static_cast<std::size_t>(j)] >> i) & 1u));
    }
  }
  return out;
}

template <class T>
void consider(VertexBest<T>& best, T value, std::vector<std::int8_t>&& pattern) {
  if (!best.valid || value > best.value ||
      (value == best.value && pattern < best.pattern)) {
    best.valid = true;
    best.value = value;
    best.pattern = std::move(pattern);
  }
}

template <class T>
VertexBest<T> sup_norm_chunk(const SparseMultilinearForm& f, const VertexPlan& plan,
                             const std::vector<T>& coeffs, std::uint64_t t_begin,
                             std::uint64_t t_end) {
  const auto& monos = f.monomials();
  const std::size_t n_mono = monos.size();
  const int n_lin = f.var_degree(plan.linear_var);
  const int B = plan.total_bits;

  // Monomial ids per sign bit.
  std::vector<std::vector<std::uint32_t>> by_bit(static_cast<std::size_t>(B));
  for (std::size_t tix = 0; tix < n_mono; ++tix) {
    for (int b = 0; b < B; ++b) {
      const int j = plan.bit_var[static_cast<std::size_t>(b)];
      if (monos[tix].indices[static_cast<std::size_t>(j)] - 1 ==
          plan.bit_coord[static_cast<std::size_t>(b)])
        by_bit[static_cast<std::size_t>(b)].push_back(static_cast<std::uint32_t>(tix));
    }
  }

  std::vector<std::uint64_t> bits_by_var(static_cast<std::size_t>(f.order()), 0);
  std::vector<std::int8_t> sigma(n_mono, +1);
  std::vector<T> lin(static_cast<std::size_t>(n_lin), T(0));

  auto rebuild = [&](std::uint64_t t) {
    const std::uint64_t g = gray(t);
    std::fill(bits_by_var.begin(), bits_by_var.end(), 0);
    for (int b = 0; b < B; ++b)
      if ((g >> b) & 1u)
        bits_by_var[static_cast<std::size_t>(plan.bit_var[static_cast<std::size_t>(b)])] |=
            std::uint64_t{1} << plan.bit_coord[static_cast<std::size_t>(b)];
    std::fill(lin.begin(), lin.end(), T(0));
    for (std::size_t tix = 0; tix < n_mono; ++tix) {
      int sg = +1;
      for (int j = 0; j < f.order(); ++j) {
        if (j == plan.linear_var) continue;
        const int i = monos[tix].indices[static_cast<std::size_t>(j)] - 1;
        if ((bits_by_var[static_cast<std::size_t>(j)] >> i) & 1u) sg = -sg;
      }
      sigma[tix] = static_cast<std::int8_t>(sg);
      const int k = monos[tix].indices[static_cast<std::size_t>(plan.linear_var)] - 1;
      lin[static_cast<std::size_t>(k)] += static_cast<T>(sg) * coeffs[tix];
    }
  };
  rebuild(t_begin);

  VertexBest<T> best;
  [[maybe_unused]] std::uint32_t since_refresh = 0;
  for (std::uint64_t t = t_begin;;) {
    T total{0};
    for (int k = 0; k < n_lin; ++k)
      total += lin[static_cast<std::size_t>(k)] < T(0) ? -lin[static_cast<std::size_t>(k)]
                                                       : lin[static_cast<std::size_t>(k)];
    if (!best.valid || total >= best.value)
      consider(best, total, flatten_pattern(f, plan, bits_by_var, lin));

    if (++t == t_end) break;
    const int b = std::countr_zero(t);
    const int j = plan.bit_var[static_cast<std::size_t>(b)];
    const int i = plan.bit_coord[static_cast<std::size_t>(b)];
    bits_by_var[static_cast<std::size_t>(j)] ^= std::uint64_t{1} << i;
    for (std::uint32_t tix : by_bit[static_cast<std::size_t>(b)]) {
      sigma[tix] = static_cast<std::int8_t>(-sigma[tix]);
      const int k = monos[tix].indices[static_cast<std::size_t>(plan.linear_var)] - 1;
      lin[static_cast<std::size_t>(k)] +=
          T(2) * static_cast<T>(sigma[tix]) * coeffs[tix];
    }
    if constexpr (std::is_floating_point_v<T>) {
      if ((++since_refresh & 0xFFFu) == 0) rebuild(t);
    }
  }
  return best;
}

template <class T>
NormCertificate sup_norm_impl(const SparseMultilinearForm& f, const VertexPlan& plan,
                              const std::vector<T>& coeffs, int threads) {
  const int B = plan.total_bits;
  const int chunk_bits = std::max(0, std::min(6, B - 8));
  const std::uint64_t n_chunks = std::uint64_t{1} << chunk_bits;
  const std::uint64_t span = (std::uint64_t{1} << B) / n_chunks;

  std::vector<VertexBest<T>> parts(static_cast<std::size_t>(n_chunks));
  for_each_chunk(n_chunks, threads, [&](std::uint64_t c) {
    parts[static_cast<std::size_t>(c)] =
        sup_norm_chunk(f, plan, coeffs, c * span, (c + 1) * span);
  });
  VertexBest<T> best;
  for (auto& part : parts)
    if (part.valid) consider(best, part.value, std::move(part.pattern));

  NormCertificate cert;
  cert.value = static_cast<double>(best.value);
  cert.witness.resize(static_cast<std::size_t>(f.order()));
  std::size_t pos = 0;
  for (int j = 0; j < f.order(); ++j) {
    const int nj = f.var_degree(j);
    auto& w = cert.witness[static_cast<std::size_t>(j)];
    w.resize(static_cast<std::size_t>(nj));
    for (int i = 0; i < nj; ++i)
      w[static_cast<std::size_t>(i)] = best.pattern[pos + static_cast<std::size_t>(i)] ? -1 : +1;
    pos += static_cast<std::size_t>(nj);
  }
  return cert;
}

}  // namespace

NormCertificate sup_norm(const SparseMultilinearForm& f, const RunOptions& opts) {
  const VertexPlan plan = make_plan(f);
  int budget = opts.max_bits > 0 ? opts.max_bits : vertex_bit_budget();
  budget = std::min(budget, kHardBitCeiling);
  if (plan.total_bits > budget)
    throw BudgetError("sup_norm needs " + std::to_string(plan.total_bits) +
                      " vertex bits, budget is " + std::to_string(budget));

  if (f.integer_coeffs()) {
    std::vector<std::int64_t> coeffs;
    coeffs.reserve(f.monomials().size());
    std::int64_t abs_mass = 0;
    for (const Monomial& t : f.monomials()) {
      coeffs.push_back(static_cast<std::int64_t>(t.coeff));
      abs_mass += std::abs(coeffs.back());
      if (abs_mass > (std::int64_t{1} << 61))
        throw Error("coefficient mass too large for integer vertex enumeration");
    }
    return sup_norm_impl<std::int64_t>(f, plan, coeffs, opts.threads);
  }
  std::vector<double> coeffs;
  coeffs.reserve(f.monomials().size());
  for (const Monomial& t : f.monomials()) coeffs.push_back(t.coeff);
  return sup_norm_impl<double>(f, plan, coeffs, opts.threads);
}

CoefficientTensor form_to_tensor(const SparseMultilinearForm& f) {
  CoefficientTensor zero = CoefficientTensor::zeros(f.var_degrees());
  std::vector<double> entries(zero.entries().begin(), zero.entries().end());
  const int m = f.order();
  for (const Monomial& t : f.monomials()) {
    std::int64_t pos = 0;
    for (int j = 0; j < m; ++j)
      pos = pos * f.var_degree(j) + (t.indices[static_cast<std::size_t>(j)] - 1);
    entries[static_cast<std::size_t>(pos)] = t.coeff;
  }
  return CoefficientTensor(f.var_degrees(), std::move(entries));
}

SparseMultilinearForm tensor_to_form(const CoefficientTensor& a) {
  const int m = a.order();
  std::vector<Monomial> monomials;
  for (std::int64_t e = 0; e < a.size(); ++e) {
    if (a.flat(e) == 0.0) continue;
    Monomial t;
    t.coeff = a.flat(e);
    t.indices.assign(static_cast<std::size_t>(m), 0);
    std::int64_t rem = e;
    for (int j = m - 1; j >= 0; --j) {
      t.indices[static_cast<std::size_t>(j)] =
          static_cast<std::int32_t>(rem % a.dim(j)) + 1;
      rem /= a.dim(j);
    }
    monomials.push_back(std::move(t));
  }
  return SparseMultilinearForm(m, std::move(monomials));
}

std::set<int> last_variable_coordinates(const SparseMultilinearForm& f) {
  std::set<int> out;
  const std::size_t last = static_cast<std::size_t>(f.order()) - 1;
  for (const Monomial& t : f.monomials()) out.insert(t.indices[last]);
  return out;
}

SparseMultilinearForm parse_form(std::istream& in) {
  std::vector<Monomial> monomials;
  int order = -1;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> nums;
    double v;
    while (ls >> v) nums.push_back(v);
    if (nums.empty()) continue;
    if (order < 0) {
      order = static_cast<int>(nums.size()) - 1;
      if (order < 1) throw ParseError("form line needs indices and a coefficient");
    }
    if (static_cast<int>(nums.size()) != order + 1)
      throw ParseError("inconsistent token count in form line");
    Monomial t;
    for (int j = 0; j < order; ++j) {
      const double ix = nums[static_cast<std::size_t>(j)];
      if (!integral_value(ix) || ix < 1) throw ParseError("bad monomial index");
      t.indices.push_back(static_cast<std::int32_t>(ix));
    }
    t.coeff = nums.back();
    monomials.push_back(std::move(t));
  }
  if (order < 0) throw ParseError("empty form input");
  return SparseMultilinearForm(order, std::move(monomials));
}

SparseMultilinearForm parse_form_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open form file: " + path);
  return parse_form(in);
}

std::string format_form(const SparseMultilinearForm& f) {
  std::string out;
  char buf[64];
  for (const Monomial& t : f.monomials()) {
    for (std::int32_t i : t.indices) {
      std::snprintf(buf, sizeof buf, "%d ", i);
      out += buf;
    }
    if (integral_value(t.coeff))
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(t.coeff));
    else
      std::snprintf(buf, sizeof buf, "%.17g", t.coeff);
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace chaoslab
