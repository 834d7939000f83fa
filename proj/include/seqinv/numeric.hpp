#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace seqinv {

/// Floor of 1/x for x in (0, 1]. A reciprocal that lands within two ulps of
/// an integer is snapped to it, so that 1/0.1 counts as 10.
std::size_t floor_reciprocal(double x);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value))
      carry_ += (sum_ - t) + value;
    else
      carry_ += (value - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double compensated_sum(std::span<const double> values);

}  // namespace seqinv
