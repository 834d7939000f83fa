#include "seqinv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seqinv {

double uniform_open0(std::uint64_t key) {
  return static_cast<double>((key >> 11) + 1) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, std::uint64_t replication, std::uint64_t coordinate, Stream stream) {
  const std::uint64_t key = draw_key(seed, replication, coordinate, stream);
  const double u1 = uniform_open0(mix64(key ^ 0x1ULL));
  const double u2 = uniform_open0(mix64(key ^ 0x2ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace seqinv

namespace seqinv {

double DrawSequence::uniform() { return uniform_open0(draw_key(seed_, replication_, counter_++, Stream::auxiliary)); }

double DrawSequence::uniform(double lo, double hi) { return lo + (hi - lo) * (1.0 - uniform()); }

double DrawSequence::log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

double DrawSequence::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t DrawSequence::index(std::size_t lo, std::size_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  const auto offset = static_cast<std::size_t>(std::floor((1.0 - uniform()) * span));
  return lo + std::min(offset, hi - lo);
}

}  // namespace seqinv
