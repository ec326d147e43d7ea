#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/common.hpp"

namespace chaoslab {

/// Dense order-m array of real coefficients a_{i1..im} in row-major order.
/// Axes may have different lengths. Immutable after construction; when every
/// entry is an integer the tensor is flagged so downstream consumers can run
/// exact arithmetic on it.
class CoefficientTensor {
 public:
  CoefficientTensor(std::vector<int> dims, std::vector<double> entries);

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(entries_.size()); }
  std::span<const double> entries() const { return entries_; }
  double flat(std::int64_t i) const { return entries_[static_cast<std::size_t>(i)]; }
  bool integer_flag() const { return integer_flag_; }

  /// Total sign bits a full Rademacher enumeration over this shape costs.
  int sign_bits() const;

  /// Entries as exact 64-bit integers; requires integer_flag().
  std::vector<std::int64_t> as_integers() const;

  static CoefficientTensor zeros(std::vector<int> dims);

 private:
  std::vector<int> dims_;
  std::vector<double> entries_;
  bool integer_flag_ = false;
};

/// Dense order-m array of d-dimensional Euclidean vectors, stored flat with
/// the d components of each entry contiguous.
class VectorTensor {
 public:
  VectorTensor(std::vector<int> dims, int ambient_dim, std::vector<double> components);

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int ambient_dim() const { return ambient_dim_; }
  std::int64_t size() const;  // number of vector entries
  std::span<const double> components() const { return components_; }
  double component(std::int64_t entry, int c) const {
    return components_[static_cast<std::size_t>(entry * ambient_dim_ + c)];
  }
  double entry_norm(std::int64_t entry) const;
  bool integer_flag() const { return integer_flag_; }
  int sign_bits() const;

 private:
  std::vector<int> dims_;
  int ambient_dim_;
  std::vector<double> components_;
  bool integer_flag_ = false;
};

/// Per-axis exponents (r_1,...,r_m) for the nested mixed norm.
struct MixedNormSpec {
  std::vector<double> exponents;
};

/// (sum |a|^r)^(1/r), r > 0. Compensated summation of the powers.
double ell_r_norm(const CoefficientTensor& a, double r);

/// (sum ||y||^r)^(1/r) over the Euclidean norms of the entries.
double ell_r_norm(const VectorTensor& y, double r);

double max_abs(const CoefficientTensor& a);
double max_abs(const VectorTensor& y);

/// Nested norm, innermost axis reduced first:
/// (sum_{i1} ( ... (sum_{im} |a|^{r_m})^{r_{m-1}/r_m} ... )^{1/r_1}.
double mixed_norm(const CoefficientTensor& a, const MixedNormSpec& spec);

/// Order-(m-1) tensor a_{i1..i_{m-1},k} for a fixed 0-based last index k.
CoefficientTensor slice_last(const CoefficientTensor& a, int k);

// --- text format -----------------------------------------------------------
//
// Scalar tensors:  "m n_1 ... n_m" header line, then the entries in row-major
// order, whitespace separated; integer entries are written without a decimal
// point. Vector tensors use a "vec" tag: "vec m n_1 ... n_m d" followed by
// the d components of each entry in row-major entry order.

CoefficientTensor parse_tensor(std::istream& in);
CoefficientTensor parse_tensor_file(const std::string& path);
std::string format_tensor(const CoefficientTensor& a);

VectorTensor parse_vector_tensor(std::istream& in);
std::string format_vector_tensor(const VectorTensor& y);

/// True when the next token of the stream is the "vec" tag.
bool sniff_vector_tensor(std::istream& in);

}  // namespace chaoslab
