#pragma once

#include <cstddef>
#include <cstdint>

namespace seqinv {

// Independent draw streams of the observation model.
enum class Stream : std::uint64_t { image_noise = 1, operator_noise = 2, auxiliary = 3 };

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based key: a pure function of its four coordinates.
constexpr std::uint64_t draw_key(std::uint64_t seed, std::uint64_t replication, std::uint64_t coordinate,
                                 Stream stream) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ replication);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  return mix64(h ^ coordinate);
}

/// Uniform on (0, 1], 53 bits.
double uniform_open0(std::uint64_t key);

/// Standard normal draw at (seed, replication, coordinate, stream) via Box-Muller.
double standard_normal(std::uint64_t seed, std::uint64_t replication, std::uint64_t coordinate, Stream stream);

}  // namespace seqinv

namespace seqinv {

/// Sequential draws on top of the counter-based keys; each draw advances a
/// private counter, so a DrawSequence is deterministic given (seed, replication).
class DrawSequence {
 public:
  DrawSequence(std::uint64_t seed, std::uint64_t replication) : seed_(seed), replication_(replication) {}

  double uniform();                       // (0, 1]
  double uniform(double lo, double hi);   // [lo, hi)
  double log_uniform(double lo, double hi);
  double normal();
  std::size_t index(std::size_t lo, std::size_t hi);  // uniform integer in [lo, hi]

 private:
  std::uint64_t seed_;
  std::uint64_t replication_;
  std::uint64_t counter_ = 0;
};

}  // namespace seqinv
