#pragma once

#include <cmath>

namespace chaoslab {

// Neumaier-compensated accumulator. Summation order is fixed by the caller,
// which keeps reductions bit-reproducible across thread counts.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  void add(const CompensatedSum& other) {
    add(other.sum);
    comp += other.comp;
  }

  double value() const { return sum + comp; }
};

}  // namespace chaoslab
