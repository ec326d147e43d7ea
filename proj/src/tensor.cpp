#include "chaoslab/tensor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "chaoslab/accum.hpp"

namespace chaoslab {

namespace {

std::int64_t checked_volume(const std::vector<int>& dims) {
  if (dims.empty()) throw Error("tensor order must be at least 1");
  if (static_cast<int>(dims.size()) > kMaxOrder)
    throw Error("tensor order exceeds limit " + std::to_string(kMaxOrder));
  std::int64_t total = 1;
  for (int n : dims) {
    if (n < 1) throw Error("tensor axis lengths must be positive");
    total *= n;
    if (total > kMaxEntries)
      throw Error("tensor entry count exceeds limit 2^24");
  }
  return total;
}

bool all_integral(std::span<const double> xs) {
  for (double x : xs) {
    if (std::abs(x) > 0x1.0p53) return false;
    if (x != std::nearbyint(x)) return false;
  }
  return true;
}

void check_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) throw Error("tensor entries must be finite");
}

// Integers print without a decimal point; everything else round-trips.
void append_number(std::string& out, double x) {
  if (std::abs(x) <= 0x1.0p53 && x == std::nearbyint(x)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(x));
    out += buf;
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
  }
}

double read_number(std::istream& in, const char* what) {
  double x;
  if (!(in >> x)) throw ParseError(std::string("expected ") + what);
  return x;
}

int read_int(std::istream& in, const char* what, int lo, int hi) {
  long long v;
  if (!(in >> v) || v < lo || v > hi)
    throw ParseError(std::string("expected ") + what);
  return static_cast<int>(v);
}

}  // namespace

CoefficientTensor::CoefficientTensor(std::vector<int> dims, std::vector<double> entries)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
  std::int64_t total = checked_volume(dims_);
  if (total != static_cast<std::int64_t>(entries_.size()))
    throw Error("entry count does not match tensor shape");
  check_finite(entries_);
  integer_flag_ = all_integral(entries_);
}

int CoefficientTensor::sign_bits() const {
  int bits = 0;
  for (int n : dims_) bits += n;
  return bits;
}

std::vector<std::int64_t> CoefficientTensor::as_integers() const {
  if (!integer_flag_) throw Error("tensor is not integer-valued");
  std::vector<std::int64_t> out(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i)
    out[i] = static_cast<std::int64_t>(entries_[i]);
  return out;
}

CoefficientTensor CoefficientTensor::zeros(std::vector<int> dims) {
  std::int64_t total = checked_volume(dims);
  return CoefficientTensor(std::move(dims), std::vector<double>(static_cast<std::size_t>(total), 0.0));
}

VectorTensor::VectorTensor(std::vector<int> dims, int ambient_dim,
                           std::vector<double> components)
    : dims_(std::move(dims)), ambient_dim_(ambient_dim), components_(std::move(components)) {
  std::int64_t total = checked_volume(dims_);
  if (ambient_dim_ < 1) throw Error("ambient dimension must be positive");
  if (total * ambient_dim_ != static_cast<std::int64_t>(components_.size()))
    throw Error("component count does not match tensor shape");
  check_finite(components_);
  integer_flag_ = all_integral(components_);
}

std::int64_t VectorTensor::size() const {
  return static_cast<std::int64_t>(components_.size()) / ambient_dim_;
}

double VectorTensor::entry_norm(std::int64_t entry) const {
  double q = 0.0;
  for (int c = 0; c < ambient_dim_; ++c) {
    double x = component(entry, c);
    q += x * x;
  }
  return std::sqrt(q);
}

int VectorTensor::sign_bits() const {
  int bits = 0;
  for (int n : dims_) bits += n;
  return bits;
}

double ell_r_norm(const CoefficientTensor& a, double r) {
  if (!(r > 0.0)) throw Error("ell_r_norm requires r > 0");
  CompensatedSum acc;
  if (r == 2.0) {
    for (double x : a.entries()) acc.add(x * x);
  } else if (r == 1.0) {
    for (double x : a.entries()) acc.add(std::abs(x));
  } else {
    for (double x : a.entries()) acc.add(std::pow(std::abs(x), r));
  }
  return std::pow(acc.value(), 1.0 / r);
}

double ell_r_norm(const VectorTensor& y, double r) {
  if (!(r > 0.0)) throw Error("ell_r_norm requires r > 0");
  CompensatedSum acc;
  for (std::int64_t i = 0; i < y.size(); ++i)
    acc.add(std::pow(y.entry_norm(i), r));
  return std::pow(acc.value(), 1.0 / r);
}

double max_abs(const CoefficientTensor& a) {
  double best = 0.0;
  for (double x : a.entries()) best = std::max(best, std::abs(x));
  return best;
}

double max_abs(const VectorTensor& y) {
  double best = 0.0;
  for (std::int64_t i = 0; i < y.size(); ++i)
    best = std::max(best, y.entry_norm(i));
  return best;
}

double mixed_norm(const CoefficientTensor& a, const MixedNormSpec& spec) {
  const int m = a.order();
  if (static_cast<int>(spec.exponents.size()) != m)
    throw Error("mixed norm spec length must equal tensor order");
  for (double r : spec.exponents)
    if (!(r > 0.0)) throw Error("mixed norm exponents must be positive");

  std::vector<double> cur(a.entries().begin(), a.entries().end());
  for (double& x : cur) x = std::abs(x);
  std::int64_t len = a.size();
  // Reduce the innermost axis first. Each pass replaces blocks of n_j values
  // by their ell_{r_j} norm.
  for (int j = m - 1; j >= 0; --j) {
    const int n = a.dim(j);
    const double r = spec.exponents[static_cast<std::size_t>(j)];
    len /= n;
    std::vector<double> next(static_cast<std::size_t>(len));
    for (std::int64_t b = 0; b < len; ++b) {
      CompensatedSum acc;
      for (int i = 0; i < n; ++i)
        acc.add(std::pow(cur[static_cast<std::size_t>(b * n + i)], r));
      next[static_cast<std::size_t>(b)] = std::pow(acc.value(), 1.0 / r);
    }
    cur.swap(next);
  }
  return cur[0];
}

CoefficientTensor slice_last(const CoefficientTensor& a, int k) {
  const int m = a.order();
  if (m < 2) throw Error("slice_last requires order >= 2");
  const int last = a.dim(m - 1);
  if (k < 0 || k >= last) throw Error("slice index out of range");
  std::vector<int> dims(a.dims().begin(), a.dims().end() - 1);
  std::int64_t blocks = a.size() / last;
  std::vector<double> entries(static_cast<std::size_t>(blocks));
  for (std::int64_t b = 0; b < blocks; ++b)
    entries[static_cast<std::size_t>(b)] = a.flat(b * last + k);
  return CoefficientTensor(std::move(dims), std::move(entries));
}

CoefficientTensor parse_tensor(std::istream& in) {
  int m = read_int(in, "tensor order", 1, kMaxOrder);
  std::vector<int> dims(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    dims[static_cast<std::size_t>(j)] = read_int(in, "axis length", 1, 1 << 24);
  std::int64_t total = 1;
  for (int n : dims) total *= n;
  if (total > kMaxEntries) throw ParseError("tensor too large");
  std::vector<double> entries(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i)
    entries[static_cast<std::size_t>(i)] = read_number(in, "tensor entry");
  return CoefficientTensor(std::move(dims), std::move(entries));
}

CoefficientTensor parse_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tensor file: " + path);
  return parse_tensor(in);
}

std::string format_tensor(const CoefficientTensor& a) {
  std::string out = std::to_string(a.order());
  for (int n : a.dims()) {
    out += ' ';
    out += std::to_string(n);
  }
  out += '\n';
  const int last = a.dim(a.order() - 1);
  for (std::int64_t i = 0; i < a.size(); ++i) {
    append_number(out, a.flat(i));
    out += ((i + 1) % last == 0) ? '\n' : ' ';
  }
  return out;
}

bool sniff_vector_tensor(std::istream& in) {
  std::streampos pos = in.tellg();
  std::string tag;
  if (!(in >> tag)) throw ParseError("empty tensor input");
  in.clear();
  in.seekg(pos);
  return tag == "vec";
}

VectorTensor parse_vector_tensor(std::istream& in) {
  std::string tag;
  if (!(in >> tag) || tag != "vec") throw ParseError("expected 'vec' tag");
  int m = read_int(in, "tensor order", 1, kMaxOrder);
  std::vector<int> dims(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    dims[static_cast<std::size_t>(j)] = read_int(in, "axis length", 1, 1 << 24);
  int d = read_int(in, "ambient dimension", 1, 1 << 20);
  std::int64_t total = 1;
  for (int n : dims) total *= n;
  if (total > kMaxEntries) throw ParseError("tensor too large");
  std::vector<double> comps(static_cast<std::size_t>(total * d));
  for (std::size_t i = 0; i < comps.size(); ++i)
    comps[i] = read_number(in, "vector component");
  return VectorTensor(std::move(dims), d, std::move(comps));
}

std::string format_vector_tensor(const VectorTensor& y) {
  std::string out = "vec " + std::to_string(y.order());
  for (int n : y.dims()) {
    out += ' ';
    out += std::to_string(n);
  }
  out += ' ';
  out += std::to_string(y.ambient_dim());
  out += '\n';
  for (std::int64_t i = 0; i < y.size(); ++i) {
    for (int c = 0; c < y.ambient_dim(); ++c) {
      if (c > 0) out += ' ';
      append_number(out, y.component(i, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace chaoslab
