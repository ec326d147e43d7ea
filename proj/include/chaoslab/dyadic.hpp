#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>

namespace chaoslab {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational with a power-of-two denominator: num / 2^log2_den.
// This is the natural value class for Rademacher averages: every exact
// moment power is an integer divided by the pattern count 2^B.
struct ExactDyadic {
  BigInt num;
  int log2_den = 0;

  ExactDyadic() = default;
  ExactDyadic(BigInt n, int k) : num(std::move(n)), log2_den(k) {}

  double to_double() const {
    return std::ldexp(num.convert_to<double>(), -log2_den);
  }

  ExactDyadic operator+(const ExactDyadic& o) const {
    if (log2_den == o.log2_den) return {num + o.num, log2_den};
    if (log2_den > o.log2_den)
      return {num + (o.num << (log2_den - o.log2_den)), log2_den};
    return {(num << (o.log2_den - log2_den)) + o.num, o.log2_den};
  }

  ExactDyadic operator*(const ExactDyadic& o) const {
    return {num * o.num, log2_den + o.log2_den};
  }

  ExactDyadic pow(int e) const {
    ExactDyadic r{1, 0};
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  bool operator==(const ExactDyadic& o) const {
    if (log2_den >= o.log2_den) return num == (o.num << (log2_den - o.log2_den));
    return (num << (o.log2_den - log2_den)) == o.num;
  }
  bool operator==(const BigInt& v) const { return num == (v << log2_den); }
  bool operator==(long long v) const { return *this == BigInt(v); }

  // Lowest-terms "numerator/denominator" rendering, e.g. 32/16 stays 32/16
  // only if constructed that way; call reduced() first for canonical output.
  std::string to_string() const {
    return num.str() + "/" + (BigInt(1) << log2_den).str();
  }

  ExactDyadic reduced() const {
    ExactDyadic r = *this;
    while (r.log2_den > 0 && r.num != 0 && (r.num & 1) == 0) {
      r.num >>= 1;
      --r.log2_den;
    }
    if (r.num == 0) r.log2_den = 0;
    return r;
  }
};

}  // namespace chaoslab
