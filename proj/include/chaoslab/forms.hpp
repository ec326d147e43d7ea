#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "chaoslab/common.hpp"
#include "chaoslab/tensor.hpp"

namespace chaoslab {

/// One signed monomial coeff * x^{(1)}_{i_1} ... x^{(m)}_{i_m}.
/// Coordinate indices are 1-based, matching the text format.
struct Monomial {
  std::vector<std::int32_t> indices;
  double coeff = 0.0;
};

/// m-linear form on sequence spaces as a list of monomials. The coordinate
/// range of variable j is the largest index used in that slot.
class SparseMultilinearForm {
 public:
  SparseMultilinearForm(int order, std::vector<Monomial> monomials);

  int order() const { return order_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  const std::vector<int>& var_degrees() const { return var_degrees_; }
  int var_degree(int j) const { return var_degrees_[static_cast<std::size_t>(j)]; }
  bool integer_coeffs() const { return integer_coeffs_; }

 private:
  int order_;
  std::vector<Monomial> monomials_;
  std::vector<int> var_degrees_;
  bool integer_coeffs_ = false;
};

/// Exact sup-norm over the product of unit sup-norm balls, with an attaining
/// vertex. On integer coefficients the value and witness are exact.
struct NormCertificate {
  double value = 0.0;
  std::vector<std::vector<std::int8_t>> witness;  // one sign vector per variable
  std::string method = "vertex-enumeration";
};

double evaluate(const SparseMultilinearForm& f,
                const std::vector<std::vector<double>>& x);

/// The form is affine in each variable, so the supremum sits at a sign
/// vertex. All variables but the one with the largest coordinate range are
/// enumerated (Gray-code walk); the last variable is optimized exactly as a
/// sum of absolute linear coefficients. Ties resolve to the
/// lexicographically smallest sign pattern.
NormCertificate sup_norm(const SparseMultilinearForm& f, const RunOptions& opts = {});

CoefficientTensor form_to_tensor(const SparseMultilinearForm& f);
SparseMultilinearForm tensor_to_form(const CoefficientTensor& a);

/// Distinct coordinate indices of the last variable that occur in monomials.
std::set<int> last_variable_coordinates(const SparseMultilinearForm& f);

// Text format: one monomial per line, "i_1 ... i_m coeff"; '#' starts a
// comment. The order is inferred from the first data line.
SparseMultilinearForm parse_form(std::istream& in);
SparseMultilinearForm parse_form_file(const std::string& path);
std::string format_form(const SparseMultilinearForm& f);

}  // namespace chaoslab
