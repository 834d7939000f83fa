#include "seqinv/numeric.hpp"

#include <limits>

namespace seqinv {

std::size_t floor_reciprocal(double x) {
  const double r = 1.0 / x;
  const double nearest = std::nearbyint(r);
  const double ulp = std::nextafter(r, std::numeric_limits<double>::infinity()) - r;
  if (std::abs(r - nearest) <= 2.0 * ulp) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(r));
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

}  // namespace seqinv
