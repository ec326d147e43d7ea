#include "chaoslab/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <type_traits>

#include "chaoslab/accum.hpp"
#include "chaoslab/parallel.hpp"

namespace chaoslab {

namespace {

// ---------------------------------------------------------------------------
// Shape bookkeeping for nested sign enumeration.
//
// The pattern space is indexed by a global counter g in [0, 2^B). Axis j owns
// a block of dims[j] bits; its local counter t_j walks that block and the
// axis's sign vector is the Gray code of t_j (set bit = -1). Axis m-1 owns the
// least significant bits, so it is the innermost, fastest-moving axis and the
// whole enumeration is resumable at any g. One g step flips exactly one sign
// unless a local counter wraps.
// ---------------------------------------------------------------------------
struct Shape {
  std::vector<int> dims;
  std::vector<int> bits_below;   // bits owned by axes > j
  std::vector<std::int64_t> vol; // vol[j] = product of dims[k], k >= j; vol[m]=1
  int total_bits = 0;

  explicit Shape(const std::vector<int>& d) : dims(d) {
    const int m = static_cast<int>(dims.size());
    bits_below.assign(static_cast<std::size_t>(m), 0);
    vol.assign(static_cast<std::size_t>(m) + 1, 1);
    for (int j = m - 1; j >= 0; --j)
      vol[static_cast<std::size_t>(j)] = vol[static_cast<std::size_t>(j) + 1] * dims[static_cast<std::size_t>(j)];
    int below = 0;
    for (int j = m - 1; j >= 0; --j) {
      bits_below[static_cast<std::size_t>(j)] = below;
      below += dims[static_cast<std::size_t>(j)];
    }
    total_bits = below;
  }
};

inline std::uint64_t gray(std::uint64_t t) { return t ^ (t >> 1); }

// Enumerates signed sums S over global indices [g_begin, g_end), calling
// sink.emit(S) once per pattern. Floating-point runs refresh the inner
// accumulator periodically to keep incremental round-off bounded.
template <class Scalar, class Sink>
void walk_scalar_range(const Shape& sh, const Scalar* data, std::uint64_t g_begin,
                       std::uint64_t g_end, Sink& sink) {
  const int m = static_cast<int>(sh.dims.size());
  const int L = m - 1;
  const int n_last = sh.dims[static_cast<std::size_t>(L)];

  std::vector<std::uint64_t> t(static_cast<std::size_t>(m));
  std::vector<std::uint64_t> eps(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const std::uint64_t mask = (std::uint64_t{1} << sh.dims[static_cast<std::size_t>(j)]) - 1;
    t[static_cast<std::size_t>(j)] = (g_begin >> sh.bits_below[static_cast<std::size_t>(j)]) & mask;
    eps[static_cast<std::size_t>(j)] = gray(t[static_cast<std::size_t>(j)]);
  }

  // contr[j] = input contracted over axes < j (j = 1..L); contr[0] aliases data.
  std::vector<std::vector<Scalar>> contr(static_cast<std::size_t>(m));
  auto source = [&](int j) -> const Scalar* {
    return j == 0 ? data : contr[static_cast<std::size_t>(j)].data();
  };
  auto contract_into = [&](int j) {
    const Scalar* src = source(j);
    auto& dst = contr[static_cast<std::size_t>(j) + 1];
    const std::int64_t slab = sh.vol[static_cast<std::size_t>(j) + 1];
    dst.assign(static_cast<std::size_t>(slab), Scalar(0));
    const int n = sh.dims[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const Scalar* blk = src + static_cast<std::int64_t>(i) * slab;
      if ((eps[static_cast<std::size_t>(j)] >> i) & 1u)
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] -= blk[k];
      else
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] += blk[k];
    }
  };
  for (int j = 0; j < L; ++j) contract_into(j);

  const Scalar* inner = source(L);
  auto inner_sum = [&]() {
    Scalar s{0};
    for (int i = 0; i < n_last; ++i)
      s += ((eps[static_cast<std::size_t>(L)] >> i) & 1u) ? -inner[i] : inner[i];
    return s;
  };
  Scalar s = inner_sum();

  constexpr bool kFloating = std::is_floating_point_v<Scalar>;
  std::uint32_t since_refresh = 0;

  for (std::uint64_t g = g_begin;;) {
    sink.emit(s);
    if (++g == g_end) break;
    int j = L;
    for (;;) {
      auto& tj = t[static_cast<std::size_t>(j)];
      tj = (tj + 1) & ((std::uint64_t{1} << sh.dims[static_cast<std::size_t>(j)]) - 1);
      if (tj != 0) break;
      eps[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    const int b = std::countr_zero(t[static_cast<std::size_t>(j)]);
    if (j == L) {
      const Scalar comp = inner[b];
      if ((eps[static_cast<std::size_t>(L)] >> b) & 1u)
        s += comp + comp;
      else
        s -= comp + comp;
      eps[static_cast<std::size_t>(L)] ^= (std::uint64_t{1} << b);
      if constexpr (kFloating) {
        // Periodic full rebuild bounds the round-off drift of the
        // incrementally maintained sums.
        if ((++since_refresh & 0xFFFu) == 0) {
          for (int q = 0; q < L; ++q) contract_into(q);
          inner = source(L);
          s = inner_sum();
        }
      }
    } else {
      const Scalar* src = source(j);
      const std::int64_t slab = sh.vol[static_cast<std::size_t>(j) + 1];
      const Scalar* blk = src + static_cast<std::int64_t>(b) * slab;
      auto& dst = contr[static_cast<std::size_t>(j) + 1];
      if ((eps[static_cast<std::size_t>(j)] >> b) & 1u)
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] += blk[k] + blk[k];
      else
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] -= blk[k] + blk[k];
      eps[static_cast<std::size_t>(j)] ^= (std::uint64_t{1} << b);
      for (int q = j + 1; q < L; ++q) contract_into(q);
      inner = source(L);
      s = inner_sum();
      since_refresh = 0;
    }
  }
}

// Vector-valued variant: entries are d-component blocks, S is a d-vector.
template <class Scalar, class Sink>
void walk_vector_range(const Shape& sh, const Scalar* data, int d,
                       std::uint64_t g_begin, std::uint64_t g_end, Sink& sink) {
  const int m = static_cast<int>(sh.dims.size());
  const int L = m - 1;
  const int n_last = sh.dims[static_cast<std::size_t>(L)];

  std::vector<std::uint64_t> t(static_cast<std::size_t>(m));
  std::vector<std::uint64_t> eps(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const std::uint64_t mask = (std::uint64_t{1} << sh.dims[static_cast<std::size_t>(j)]) - 1;
    t[static_cast<std::size_t>(j)] = (g_begin >> sh.bits_below[static_cast<std::size_t>(j)]) & mask;
    eps[static_cast<std::size_t>(j)] = gray(t[static_cast<std::size_t>(j)]);
  }

  std::vector<std::vector<Scalar>> contr(static_cast<std::size_t>(m));
  auto source = [&](int j) -> const Scalar* {
    return j == 0 ? data : contr[static_cast<std::size_t>(j)].data();
  };
  auto contract_into = [&](int j) {
    const Scalar* src = source(j);
    auto& dst = contr[static_cast<std::size_t>(j) + 1];
    const std::int64_t slab = sh.vol[static_cast<std::size_t>(j) + 1] * d;
    dst.assign(static_cast<std::size_t>(slab), Scalar(0));
    const int n = sh.dims[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const Scalar* blk = src + static_cast<std::int64_t>(i) * slab;
      if ((eps[static_cast<std::size_t>(j)] >> i) & 1u)
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] -= blk[k];
      else
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] += blk[k];
    }
  };
  for (int j = 0; j < L; ++j) contract_into(j);

  const Scalar* inner = source(L);
  std::vector<Scalar> s(static_cast<std::size_t>(d));
  auto inner_sum = [&]() {
    std::fill(s.begin(), s.end(), Scalar(0));
    for (int i = 0; i < n_last; ++i) {
      const Scalar* blk = inner + static_cast<std::int64_t>(i) * d;
      if ((eps[static_cast<std::size_t>(L)] >> i) & 1u)
        for (int c = 0; c < d; ++c) s[static_cast<std::size_t>(c)] -= blk[c];
      else
        for (int c = 0; c < d; ++c) s[static_cast<std::size_t>(c)] += blk[c];
    }
  };
  inner_sum();

  constexpr bool kFloating = std::is_floating_point_v<Scalar>;
  std::uint32_t since_refresh = 0;

  for (std::uint64_t g = g_begin;;) {
    sink.emit(s.data(), d);
    if (++g == g_end) break;
    int j = L;
    for (;;) {
      auto& tj = t[static_cast<std::size_t>(j)];
      tj = (tj + 1) & ((std::uint64_t{1} << sh.dims[static_cast<std::size_t>(j)]) - 1);
      if (tj != 0) break;
      eps[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    const int b = std::countr_zero(t[static_cast<std::size_t>(j)]);
    if (j == L) {
      const Scalar* blk = inner + static_cast<std::int64_t>(b) * d;
      if ((eps[static_cast<std::size_t>(L)] >> b) & 1u)
        for (int c = 0; c < d; ++c) s[static_cast<std::size_t>(c)] += blk[c] + blk[c];
      else
        for (int c = 0; c < d; ++c) s[static_cast<std::size_t>(c)] -= blk[c] + blk[c];
      eps[static_cast<std::size_t>(L)] ^= (std::uint64_t{1} << b);
      if constexpr (kFloating) {
        if ((++since_refresh & 0xFFFu) == 0) {
          for (int q = 0; q < L; ++q) contract_into(q);
          inner = source(L);
          inner_sum();
        }
      }
    } else {
      const Scalar* src = source(j);
      const std::int64_t slab = sh.vol[static_cast<std::size_t>(j) + 1] * d;
      const Scalar* blk = src + static_cast<std::int64_t>(b) * slab;
      auto& dst = contr[static_cast<std::size_t>(j) + 1];
      if ((eps[static_cast<std::size_t>(j)] >> b) & 1u)
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] += blk[k] + blk[k];
      else
        for (std::int64_t k = 0; k < slab; ++k) dst[static_cast<std::size_t>(k)] -= blk[k] + blk[k];
      eps[static_cast<std::size_t>(j)] ^= (std::uint64_t{1} << b);
      for (int q = j + 1; q < L; ++q) contract_into(q);
      inner = source(L);
      inner_sum();
      since_refresh = 0;
    }
  }
}

// Fixed chunk grid over the pattern space: a function of B only, so results
// cannot depend on the worker count.
int chunk_bits_for(int total_bits) {
  return std::max(0, std::min(8, total_bits - 10));
}

using u128 = unsigned __int128;

BigInt big_from_u128(u128 v) {
  BigInt hi = static_cast<std::uint64_t>(v >> 64);
  return (hi << 64) + static_cast<std::uint64_t>(v);
}

struct IntPowSink {
  u128 acc = 0;
  int pexp = 1;
  void emit(std::int64_t s) {
    std::uint64_t a = s < 0 ? static_cast<std::uint64_t>(-s) : static_cast<std::uint64_t>(s);
    if (pexp == 1) {
      acc += a;
    } else {
      u128 t = a;
      for (int i = 1; i < pexp; ++i) t *= a;
      acc += t;
    }
  }
};

struct BigPowSink {
  BigInt acc{0};
  int pexp = 1;
  void emit(std::int64_t s) {
    BigInt t = s < 0 ? -s : s;
    BigInt r = t;
    for (int i = 1; i < pexp; ++i) r *= t;
    acc += r;
  }
};

struct FloatPowSink {
  CompensatedSum acc;
  double p = 1.0;
  int kind = 0;  // 1, 2, 4 fast-pathed; 0 = general pow
  void emit(double s) {
    switch (kind) {
      case 1: acc.add(std::abs(s)); break;
      case 2: acc.add(s * s); break;
      case 4: { double q = s * s; acc.add(q * q); break; }
      default: acc.add(std::pow(std::abs(s), p));
    }
  }
};

struct IntVecPowSink {
  u128 acc = 0;
  int half_pexp = 1;  // exponent applied to ||s||^2
  void emit(const std::int64_t* s, int d) {
    u128 q = 0;
    for (int c = 0; c < d; ++c) {
      u128 x = s[c] < 0 ? static_cast<std::uint64_t>(-s[c]) : static_cast<std::uint64_t>(s[c]);
      q += x * x;
    }
    u128 t = q;
    for (int i = 1; i < half_pexp; ++i) t *= q;
    acc += t;
  }
};

struct BigVecPowSink {
  BigInt acc{0};
  int half_pexp = 1;
  void emit(const std::int64_t* s, int d) {
    BigInt q{0};
    for (int c = 0; c < d; ++c) q += BigInt(s[c]) * s[c];
    BigInt t = q;
    for (int i = 1; i < half_pexp; ++i) t *= q;
    acc += t;
  }
};

struct FloatVecPowSink {
  CompensatedSum acc;
  double p = 1.0;
  void emit(const double* s, int d) {
    double q = 0.0;
    for (int c = 0; c < d; ++c) q += s[c] * s[c];
    if (p == 1.0)
      acc.add(std::sqrt(q));
    else if (p == 2.0)
      acc.add(q);
    else
      acc.add(std::pow(q, 0.5 * p));
  }
};

template <class Sink, class Walk>
std::vector<Sink> run_chunked(int total_bits, int threads, const Sink& proto,
                              const Walk& walk) {
  const int cb = chunk_bits_for(total_bits);
  const std::uint64_t n_chunks = std::uint64_t{1} << cb;
  const std::uint64_t chunk_span = std::uint64_t{1} << (total_bits - cb);
  std::vector<Sink> sinks(n_chunks, proto);
  for_each_chunk(n_chunks, threads, [&](std::uint64_t c) {
    walk(c * chunk_span, (c + 1) * chunk_span, sinks[c]);
  });
  return sinks;
}

int resolve_bits(const RunOptions& opts) {
  int bits = opts.max_bits > 0 ? opts.max_bits : moment_bit_budget();
  return std::min(bits, kHardBitCeiling);
}

// p values eligible for exact integer accumulation: 1 and even integers
// (these make |S|^p an integer-valued statistic).
bool exact_eligible_p(double p, int* pexp) {
  if (p == 1.0) { *pexp = 1; return true; }
  if (p == std::floor(p) && p >= 2.0 && p <= 32.0 &&
      static_cast<int>(p) % 2 == 0) {
    *pexp = static_cast<int>(p);
    return true;
  }
  return false;
}

BigInt abs_entry_sum(const std::vector<std::int64_t>& data) {
  BigInt s{0};
  for (std::int64_t x : data) s += x < 0 ? -x : x;
  return s;
}

BigInt pow_big(const BigInt& b, int e) {
  BigInt r{1};
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double root_of_mean(const BigInt& total, int bits, double p) {
  double mean = std::ldexp(total.convert_to<double>(), -bits);
  if (p == 1.0) return mean;
  if (p == 2.0) return std::sqrt(mean);
  return std::pow(mean, 1.0 / p);
}

MomentResult exact_scalar_moment(const CoefficientTensor& a, double p, int bits_budget,
                                 int threads) {
  const int B = a.sign_bits();
  if (B > bits_budget)
    throw BudgetError("exact enumeration needs " + std::to_string(B) +
                      " sign bits, budget is " + std::to_string(bits_budget));
  const Shape sh(a.dims());

  MomentResult res;
  res.p = p;
  res.mode = MomentMode::exact_enumeration;
  res.count = std::uint64_t{1} << B;

  int pexp = 0;
  if (a.integer_flag() && exact_eligible_p(p, &pexp)) {
    const std::vector<std::int64_t> data = a.as_integers();
    const BigInt max_s = abs_entry_sum(data);
    if (max_s >= (BigInt(1) << 62))
      throw Error("integer magnitude too large for exact enumeration");
    const bool fast = pow_big(max_s, pexp) <= (BigInt(1) << (126 - B));
    BigInt total{0};
    auto walk = [&](std::uint64_t lo, std::uint64_t hi, auto& sink) {
      walk_scalar_range<std::int64_t>(sh, data.data(), lo, hi, sink);
    };
    if (fast) {
      IntPowSink proto;
      proto.pexp = pexp;
      auto sinks = run_chunked(B, threads, proto, walk);
      for (const auto& s : sinks) total += big_from_u128(s.acc);
    } else {
      BigPowSink proto;
      proto.pexp = pexp;
      auto sinks = run_chunked(B, threads, proto, walk);
      for (const auto& s : sinks) total += s.acc;
    }
    res.exact_power = ExactDyadic(total, B);
    res.value = root_of_mean(total, B, p);
    return res;
  }

  FloatPowSink proto;
  proto.p = p;
  proto.kind = (p == 1.0) ? 1 : (p == 2.0) ? 2 : (p == 4.0) ? 4 : 0;
  auto walk = [&](std::uint64_t lo, std::uint64_t hi, auto& sink) {
    walk_scalar_range<double>(sh, a.entries().data(), lo, hi, sink);
  };
  auto sinks = run_chunked(B, threads, proto, walk);
  CompensatedSum total;
  for (const auto& s : sinks) total.add(s.acc);
  double mean = std::ldexp(total.value(), -B);
  res.value = (p == 1.0) ? mean : (p == 2.0) ? std::sqrt(mean) : std::pow(mean, 1.0 / p);
  return res;
}

}  // namespace

int rademacher_eval(int index, double t) {
  if (index < 1) throw Error("rademacher index must be >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw Error("rademacher argument outside [0,1]");
  if (t == 1.0) return +1;  // floor(2^n) is even
  // Parity of floor(2^n t) = n-th binary digit of t; doubling is exact.
  int bit = 0;
  double x = t;
  for (int i = 0; i < index; ++i) {
    x += x;
    if (x >= 1.0) {
      bit = 1;
      x -= 1.0;
    } else {
      bit = 0;
    }
  }
  return bit ? -1 : +1;
}

MomentResult moment_p_exact(const CoefficientTensor& a, double p,
                            const RunOptions& opts) {
  if (!(p > 0.0)) throw Error("moment order p must be positive");
  return exact_scalar_moment(a, p, resolve_bits(opts), opts.threads);
}

MomentResult moment_p_exact_vec(const VectorTensor& y, double p,
                                const RunOptions& opts) {
  if (!(p > 0.0)) throw Error("moment order p must be positive");
  const int B = y.sign_bits();

  if (p == 2.0) {
    // Parseval over the Walsh system: value^2 = sum of squared entry norms.
    MomentResult res;
    res.p = p;
    res.mode = MomentMode::exact_enumeration;
    res.count = B <= kHardBitCeiling ? (std::uint64_t{1} << B) : 0;
    CompensatedSum q;
    for (double c : y.components()) q.add(c * c);
    res.value = std::sqrt(q.value());
    if (y.integer_flag()) {
      BigInt total{0};
      for (double c : y.components()) {
        BigInt v = static_cast<long long>(c);
        total += v * v;
      }
      res.exact_power = ExactDyadic(total, 0);
    }
    return res;
  }

  const int bits_budget = resolve_bits(opts);
  if (B > bits_budget)
    throw BudgetError("exact enumeration needs " + std::to_string(B) +
                      " sign bits, budget is " + std::to_string(bits_budget));
  const Shape sh(y.dims());
  const int d = y.ambient_dim();

  MomentResult res;
  res.p = p;
  res.mode = MomentMode::exact_enumeration;
  res.count = std::uint64_t{1} << B;

  const bool even_p = (p == std::floor(p) && p >= 4.0 && p <= 32.0 &&
                       static_cast<int>(p) % 2 == 0);
  if (y.integer_flag() && even_p) {
    const int half = static_cast<int>(p) / 2;
    std::vector<std::int64_t> data(y.components().size());
    for (std::size_t i = 0; i < data.size(); ++i)
      data[i] = static_cast<std::int64_t>(y.components()[i]);
    // Per-component signed sums are bounded by the per-component abs mass.
    BigInt max_comp{0};
    for (int c = 0; c < d; ++c) {
      BigInt s{0};
      for (std::int64_t i = 0; i < y.size(); ++i) {
        std::int64_t v = data[static_cast<std::size_t>(i * d + c)];
        s += v < 0 ? -v : v;
      }
      max_comp = std::max(max_comp, s);
    }
    if (max_comp >= (BigInt(1) << 62))
      throw Error("integer magnitude too large for exact enumeration");
    const BigInt q_bound = pow_big(max_comp, 2) * d;
    const bool fast = max_comp <= (BigInt(1) << 31) &&
                      pow_big(q_bound, half) <= (BigInt(1) << (126 - B));
    BigInt total{0};
    auto walk = [&](std::uint64_t lo, std::uint64_t hi, auto& sink) {
      walk_vector_range<std::int64_t>(sh, data.data(), d, lo, hi, sink);
    };
    if (fast) {
      IntVecPowSink proto;
      proto.half_pexp = half;
      auto sinks = run_chunked(B, opts.threads, proto, walk);
      for (const auto& s : sinks) total += big_from_u128(s.acc);
    } else {
      BigVecPowSink proto;
      proto.half_pexp = half;
      auto sinks = run_chunked(B, opts.threads, proto, walk);
      for (const auto& s : sinks) total += s.acc;
    }
    res.exact_power = ExactDyadic(total, B);
    res.value = root_of_mean(total, B, p);
    return res;
  }

  FloatVecPowSink proto;
  proto.p = p;
  auto walk = [&](std::uint64_t lo, std::uint64_t hi, auto& sink) {
    walk_vector_range<double>(sh, y.components().data(), d, lo, hi, sink);
  };
  auto sinks = run_chunked(B, opts.threads, proto, walk);
  CompensatedSum total;
  for (const auto& s : sinks) total.add(s.acc);
  double mean = std::ldexp(total.value(), -B);
  res.value = (p == 1.0) ? mean : std::pow(mean, 1.0 / p);
  return res;
}

SignMatrix SignMatrix::sampled(const std::vector<int>& dims, const CounterRng& rng,
                               std::uint64_t sample_index) {
  SignMatrix sm;
  sm.lens = dims;
  sm.row_offset.resize(dims.size());
  int total_words = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    sm.row_offset[j] = total_words;
    total_words += (dims[j] + 63) / 64;
  }
  sm.words.resize(static_cast<std::size_t>(total_words));
  for (int w = 0; w < total_words; ++w)
    sm.words[static_cast<std::size_t>(w)] =
        rng.word(0x5159 + static_cast<std::uint64_t>(w), sample_index);
  return sm;
}

namespace {

// Factorized signed sum for one sampled sign matrix (scratch reused).
double mc_signed_sum(const Shape& sh, std::span<const double> data,
                     const SignMatrix& sm, std::vector<double>& scratch) {
  const int m = static_cast<int>(sh.dims.size());
  scratch.assign(data.begin(), data.end());
  std::int64_t len = sh.vol[0];
  for (int j = 0; j < m; ++j) {
    const int n = sh.dims[static_cast<std::size_t>(j)];
    const std::int64_t slab = len / n;
    for (std::int64_t k = 0; k < slab; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        double v = scratch[static_cast<std::size_t>(i * slab + k)];
        acc += sm.sign(j, i) < 0 ? -v : v;
      }
      scratch[static_cast<std::size_t>(k)] = acc;
    }
    len = slab;
  }
  return scratch[0];
}

void mc_signed_sum_vec(const Shape& sh, std::span<const double> comps, int d,
                       const SignMatrix& sm, std::vector<double>& scratch,
                       double* out) {
  const int m = static_cast<int>(sh.dims.size());
  scratch.assign(comps.begin(), comps.end());
  std::int64_t len = sh.vol[0] * d;
  for (int j = 0; j < m; ++j) {
    const int n = sh.dims[static_cast<std::size_t>(j)];
    const std::int64_t slab = len / n;
    for (std::int64_t k = 0; k < slab; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        double v = scratch[static_cast<std::size_t>(i * slab + k)];
        acc += sm.sign(j, i) < 0 ? -v : v;
      }
      scratch[static_cast<std::size_t>(k)] = acc;
    }
    len = slab;
  }
  for (int c = 0; c < d; ++c) out[c] = scratch[static_cast<std::size_t>(c)];
}

// Deterministic two-pass Monte Carlo over a fixed sample-chunk grid.
template <class SampleFn>
MomentResult mc_driver(const std::vector<int>& dims, double p, std::uint64_t samples,
                       std::uint64_t seed, int threads, const SampleFn& statistic) {
  if (samples < 100) throw Error("monte carlo needs at least 100 samples");
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t n_chunks = (samples + kChunk - 1) / kChunk;
  const CounterRng rng(seed);

  auto chunked_pass = [&](auto per_sample) {
    std::vector<CompensatedSum> parts(static_cast<std::size_t>(n_chunks));
    for_each_chunk(n_chunks, threads, [&](std::uint64_t c) {
      std::vector<double> scratch;
      CompensatedSum acc;
      const std::uint64_t lo = c * kChunk;
      const std::uint64_t hi = std::min(samples, lo + kChunk);
      for (std::uint64_t i = lo; i < hi; ++i) {
        SignMatrix sm = SignMatrix::sampled(dims, rng, i);
        acc.add(per_sample(sm, scratch));
      }
      parts[static_cast<std::size_t>(c)] = acc;
    });
    CompensatedSum total;
    for (const auto& part : parts) total.add(part);
    return total.value();
  };

  const double mean =
      chunked_pass([&](const SignMatrix& sm, std::vector<double>& scratch) {
        return statistic(sm, scratch);
      }) /
      static_cast<double>(samples);
  const double sq_dev =
      chunked_pass([&](const SignMatrix& sm, std::vector<double>& scratch) {
        double dlt = statistic(sm, scratch) - mean;
        return dlt * dlt;
      });

  MomentResult res;
  res.p = p;
  res.mode = MomentMode::monte_carlo;
  res.count = samples;
  res.value = (p == 1.0) ? mean : std::pow(mean, 1.0 / p);
  const double var = std::max(0.0, sq_dev / static_cast<double>(samples - 1));
  res.std_error = std::sqrt(var / static_cast<double>(samples));
  return res;
}

double pow_stat(double s, double p) {
  if (p == 1.0) return std::abs(s);
  if (p == 2.0) return s * s;
  return std::pow(std::abs(s), p);
}

}  // namespace

MomentResult moment_p_mc(const CoefficientTensor& a, double p, std::uint64_t samples,
                         std::uint64_t seed, const RunOptions& opts) {
  if (!(p > 0.0)) throw Error("moment order p must be positive");
  const Shape sh(a.dims());
  return mc_driver(a.dims(), p, samples, seed, opts.threads,
                   [&](const SignMatrix& sm, std::vector<double>& scratch) {
                     return pow_stat(mc_signed_sum(sh, a.entries(), sm, scratch), p);
                   });
}

MomentResult moment_p_mc(const VectorTensor& y, double p, std::uint64_t samples,
                         std::uint64_t seed, const RunOptions& opts) {
  if (!(p > 0.0)) throw Error("moment order p must be positive");
  const Shape sh(y.dims());
  const int d = y.ambient_dim();
  return mc_driver(y.dims(), p, samples, seed, opts.threads,
                   [&](const SignMatrix& sm, std::vector<double>& scratch) {
                     double s[64];
                     std::vector<double> buf;
                     if (d > 64) throw Error("ambient dimension too large for MC");
                     mc_signed_sum_vec(sh, y.components(), d, sm, scratch, s);
                     double q = 0.0;
                     for (int c = 0; c < d; ++c) q += s[c] * s[c];
                     return (p == 1.0) ? std::sqrt(q) : std::pow(q, 0.5 * p);
                   });
}

MomentResult moment_p_auto(const CoefficientTensor& a, double p,
                           std::uint64_t mc_samples, std::uint64_t mc_seed,
                           const RunOptions& opts) {
  if (a.sign_bits() <= resolve_bits(opts)) return moment_p_exact(a, p, opts);
  return moment_p_mc(a, p, mc_samples, mc_seed, opts);
}

ExactDyadic abs_sign_sum_expectation(int n) {
  if (n < 1) throw Error("sign count must be positive");
  // n * 2^{1-n} * C(n-1, floor((n-1)/2))
  BigInt binom{1};
  const int top = n - 1;
  const int k = top / 2;
  for (int i = 1; i <= k; ++i) {
    binom *= (top - k + i);
    binom /= i;
  }
  return ExactDyadic(BigInt(2) * n * binom, n);
}

}  // namespace chaoslab
