#include "chaoslab/inequalities.hpp"

#include <algorithm>
#include <cmath>

#include "chaoslab/accum.hpp"

namespace chaoslab {

namespace {

bool uniform_dims(const std::vector<int>& dims) {
  for (int n : dims)
    if (n != dims[0]) return false;
  return true;
}

bool holds_leq(double lhs, double rhs) { return lhs <= rhs * (1.0 + kHoldsSlack); }

double safe_ratio(double lhs, double rhs) { return rhs == 0.0 ? 0.0 : lhs / rhs; }

BoundReport make_report(std::string theorem, const std::vector<int>& dims, double r,
                        double p, double lhs, double constant, double exponent,
                        MomentResult moment) {
  BoundReport rep;
  rep.lhs = lhs;
  rep.constant_used = constant;
  rep.exponent_used = exponent;
  const double n = dims.empty() ? 1.0 : static_cast<double>(dims[0]);
  rep.rhs = constant * std::pow(n, exponent) * moment.value;
  rep.ratio = safe_ratio(lhs, rep.rhs);
  rep.holds = holds_leq(lhs, rep.rhs);
  rep.moment = std::move(moment);
  rep.context = BoundContext{std::move(theorem), static_cast<int>(dims.size()), dims, r, p};
  return rep;
}

MomentResult auto_moment(const CoefficientTensor& a, double p, const RunOptions& opts,
                         const MomentFallback& fb) {
  return moment_p_auto(a, p, fb.samples, fb.seed, opts);
}

MomentResult auto_moment(const VectorTensor& y, double p, const RunOptions& opts,
                         const MomentFallback& fb) {
  int budget = opts.max_bits > 0 ? opts.max_bits : moment_bit_budget();
  if (p == 2.0 || y.sign_bits() <= budget) return moment_p_exact_vec(y, p, opts);
  return moment_p_mc(y, p, fb.samples, fb.seed, opts);
}

}  // namespace

const std::vector<CertifiedConstant>& constants_table() {
  static const std::vector<CertifiedConstant> table = {
      {"A_1", kA1, "optimal lower Khinchin constant at p=1 (Szarek)"},
      {"B_p, p<=2", kBpUpToTwo, "upper Khinchin constant is 1 for p <= 2 (monotone moments)"},
      {"K_{1,2}", kK12, "optimal Kahane constant between L1 and L2"},
      {"c_2(H)", kCotype2Hilbert, "Hilbert spaces have cotype-2 constant 1"},
  };
  return table;
}

double khinchin_ratio(const CoefficientTensor& a, double p, const RunOptions& opts,
                      const MomentFallback& fb) {
  if (a.order() != 1) throw Error("khinchin_ratio expects an order-1 tensor");
  const double l2 = ell_r_norm(a, 2.0);
  if (l2 == 0.0) throw Error("khinchin_ratio needs a nonzero tensor");
  return auto_moment(a, p, opts, fb).value / l2;
}

BoundReport verify_multik(const CoefficientTensor& a, const RunOptions& opts,
                          const MomentFallback& fb) {
  const int m = a.order();
  MomentResult mom = auto_moment(a, 1.0, opts, fb);
  return make_report("multiple-khinchin-l2", a.dims(), 2.0, 1.0, ell_r_norm(a, 2.0),
                     std::pow(2.0, 0.5 * m), 0.0, std::move(mom));
}

BoundReport verify_theorem1(const CoefficientTensor& a, double r, const RunOptions& opts,
                            const MomentFallback& fb) {
  if (!(r > 0.0 && r < 2.0)) throw Error("verify_theorem1 needs 0 < r < 2");
  if (!uniform_dims(a.dims())) throw Error("verify_theorem1 needs uniform dims");
  const int m = a.order();
  MomentResult mom = auto_moment(a, 1.0, opts, fb);
  return make_report("lr-blowup-upper", a.dims(), r, 1.0, ell_r_norm(a, r),
                     std::pow(2.0, 0.5 * m), m * (1.0 / r - 0.5), std::move(mom));
}

BoundReport verify_mixed(const CoefficientTensor& a, const MixedNormSpec& spec,
                         const RunOptions& opts, const MomentFallback& fb) {
  if (static_cast<int>(spec.exponents.size()) != a.order())
    throw Error("mixed spec length must equal order");
  double inv_sum = 0.0;
  for (double rj : spec.exponents) {
    if (!(rj > 0.0 && rj < 2.0)) throw Error("verify_mixed needs all r_j in (0,2)");
    inv_sum += 1.0 / rj;
  }
  if (!uniform_dims(a.dims())) throw Error("verify_mixed needs uniform dims");
  const int m = a.order();
  MomentResult mom = auto_moment(a, 1.0, opts, fb);
  return make_report("mixed-lr-blowup-upper", a.dims(), spec.exponents[0], 1.0,
                     mixed_norm(a, spec), std::pow(2.0, 0.5 * m), inv_sum - 0.5 * m,
                     std::move(mom));
}

BoundReport verify_prop(const CoefficientTensor& a, double r, const RunOptions& opts,
                        const MomentFallback& fb) {
  if (!(r >= 2.0)) throw Error("verify_prop needs r >= 2");
  const int m = a.order();
  MomentResult mom = auto_moment(a, 1.0, opts, fb);
  return make_report("lr-optimal-2^(m/r)", a.dims(), r, 1.0, ell_r_norm(a, r),
                     std::pow(2.0, static_cast<double>(m) / r), 0.0, std::move(mom));
}

BoundReport verify_contraction(const CoefficientTensor& a, const RunOptions& opts,
                               const MomentFallback& fb) {
  MomentResult mom = auto_moment(a, 1.0, opts, fb);
  return make_report("contraction-principle", a.dims(), 0.0, 1.0, max_abs(a), 1.0, 0.0,
                     std::move(mom));
}

BoundReport verify_contraction(const VectorTensor& y, const RunOptions& opts,
                               const MomentFallback& fb) {
  MomentResult mom = auto_moment(y, 1.0, opts, fb);
  return make_report("contraction-principle", y.dims(), 0.0, 1.0, max_abs(y), 1.0, 0.0,
                     std::move(mom));
}

BoundReport verify_multiple_kahane(const VectorTensor& y, double p, double q,
                                   const RunOptions& opts, const MomentFallback& fb) {
  if (p != 1.0 || q != 2.0)
    throw Error("verify_multiple_kahane certifies only (p,q) = (1,2)");
  const int m = y.order();
  const double moment2 = auto_moment(y, 2.0, opts, fb).value;
  MomentResult mom1 = auto_moment(y, 1.0, opts, fb);
  return make_report("multiple-kahane-12", y.dims(), 0.0, 1.0, moment2,
                     std::pow(kK12, m), 0.0, std::move(mom1));
}

BoundReport verify_hilbert_prop(const VectorTensor& y, double r, const RunOptions& opts,
                                const MomentFallback& fb) {
  if (!(r >= 2.0)) throw Error("verify_hilbert_prop needs r >= 2");
  const int m = y.order();
  MomentResult mom = auto_moment(y, 1.0, opts, fb);
  return make_report("hilbert-lr-optimal-2^(m/r)", y.dims(), r, 1.0, ell_r_norm(y, r),
                     std::pow(2.0, static_cast<double>(m) / r), 0.0, std::move(mom));
}

SliceLowerBound lower_bound_from_slices(const SparseMultilinearForm& f, double r,
                                        const RunOptions& opts) {
  if (f.order() < 2) throw Error("slice bound needs an order >= 2 form");
  if (!(r > 0.0)) throw Error("slice bound needs r > 0");
  const int m = f.order() - 1;
  const CoefficientTensor tensor = form_to_tensor(f);
  const int last = tensor.dim(m);

  SliceLowerBound out;
  CompensatedSum lsum;
  CompensatedSum msum;
  const bool integer_r = (r == std::floor(r) && r <= 64.0);
  bool exact = tensor.integer_flag();
  std::optional<ExactDyadic> msum_exact;
  std::vector<BigInt> lr_pows;

  for (int k = 0; k < last; ++k) {
    const CoefficientTensor slice = slice_last(tensor, k);
    lsum.add(ell_r_norm(slice, r));
    MomentResult mom = moment_p_exact(slice, 1.0, opts);
    msum.add(mom.value);
    if (mom.exact_power.has_value()) {
      if (!msum_exact.has_value())
        msum_exact = mom.exact_power;
      else
        msum_exact = *msum_exact + *mom.exact_power;
    } else {
      exact = false;
    }
    if (exact && integer_r) {
      BigInt mass{0};
      const auto ints = slice.as_integers();
      for (std::int64_t v : ints) {
        BigInt term = v < 0 ? -v : v;
        BigInt acc{1};
        for (int e = 0; e < static_cast<int>(r); ++e) acc *= term;
        mass += acc;
      }
      lr_pows.push_back(mass);
    }
    out.slice_moments.push_back(std::move(mom));
  }

  const double L = lsum.value();
  const double M = msum.value();
  out.bound = M == 0.0 ? 0.0 : L / M;
  if (exact) {
    out.moment_sum_exact = msum_exact;
    if (integer_r) out.slice_lr_pow_exact = std::move(lr_pows);
  }

  BoundReport rep;
  rep.lhs = L;
  rep.rhs = M;
  rep.constant_used = std::pow(2.0, static_cast<double>(m) / r);
  rep.exponent_used = 0.0;
  rep.ratio = out.bound;
  rep.holds = holds_leq(out.bound, rep.constant_used);
  rep.context = BoundContext{"slice-lower-bound", m, tensor.dims(), r, 1.0};
  out.report = std::move(rep);
  return out;
}

BoundReport ksz_exponent_bound(const KszCertificate& cert, double r) {
  if (cert.form.order() < 2) throw Error("exponent bound needs an order >= 2 witness");
  if (!(r > 0.0)) throw Error("exponent bound needs r > 0");
  const int m = cert.form.order() - 1;
  const double n = static_cast<double>(cert.form.var_degree(0));
  const double bound = std::pow(n, 1.0 + static_cast<double>(m) / r) / cert.certified_norm;
  const double exponent = m * (1.0 / r - 0.5);
  const double ceiling = std::pow(2.0, 0.5 * m) * std::pow(n, exponent);

  BoundReport rep;
  rep.lhs = bound;
  rep.rhs = ceiling;
  rep.constant_used = std::pow(2.0, 0.5 * m);
  rep.exponent_used = exponent;
  rep.ratio = safe_ratio(bound, ceiling);
  rep.holds = holds_leq(bound, ceiling);
  rep.context = BoundContext{"ksz-exponent-lower", m,
                             std::vector<int>(static_cast<std::size_t>(m),
                                              cert.form.var_degree(0)),
                             r, 1.0};
  return rep;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw Error("fit needs at least 3 points");
  double sx = 0, sy = 0;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0)) throw Error("fit needs positive points");
    sx += std::log(n);
    sy += std::log(v);
  }
  const double cnt = static_cast<double>(points.size());
  const double mx = sx / cnt;
  const double my = sy / cnt;
  double sxx = 0, sxy = 0;
  for (const auto& [n, v] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0.0) throw Error("fit needs at least two distinct n values");

  FitResult fit;
  fit.points = points;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [n, v] : points) {
    const double pred = fit.intercept + fit.slope * std::log(n);
    fit.max_residual = std::max(fit.max_residual, std::abs(std::log(v) - pred));
  }
  return fit;
}

}  // namespace chaoslab
