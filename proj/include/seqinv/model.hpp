#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqinv/weights.hpp"

namespace seqinv {

inline constexpr std::size_t kDefaultJCap = 100000;

/// Solution class F (weights s, radius r), operator class T (weights b,
/// width d) and the loss weights omega.
struct ClassParams {
  double r = 1.0;
  double d = 1.0;
  WeightSequence s_seq;
  WeightSequence b_seq;
  WeightSequence omega_seq;
  // Exponents of the mild/severe families; empty for custom sequences.
  std::optional<double> p, b, s;

  /// Mildly ill-posed Sobolev setup: s_j = j^{2p}, b_j = j^{-2b}, omega_j = j^{2s}.
  static ClassParams mild(double p, double b, double s, double r, double d);
  /// Severely ill-posed: b_j = exp(-j^{2b}).
  static ClassParams severe(double p, double b, double s, double r, double d);

  /// Throws ConfigError on r <= 0, d < 1, or p < s / negative exponents.
  void validate() const;
};

enum class SolutionKind { boundary_single, boundary_spread };
enum class OperatorKind { mid_class, edge };

SolutionKind parse_solution_kind(std::string_view tag);
OperatorKind parse_operator_kind(std::string_view tag);
std::string_view to_string(SolutionKind kind);
std::string_view to_string(OperatorKind kind);

struct ProblemInstance {
  std::vector<double> coeffs;           // [f]_j, j = 1..J
  std::vector<double> eigenvalues;      // a_j > 0 (may underflow to 0 for exp-decay)
  std::vector<double> log_eigenvalues;  // log a_j, always exact
  ClassParams params;

  std::size_t J() const { return coeffs.size(); }
};

ProblemInstance make_instance(SolutionKind solution, OperatorKind op, const ClassParams& params, std::size_t J);

struct MembershipResult {
  bool pass = false;
  double value = 0.0;  // attained norm, or worst ratio a_j^2 / b_j
  std::optional<std::size_t> worst_index;
};

/// sum_j s_j [f]_j^2 <= r, relative tolerance 1e-12.
MembershipResult check_solution_membership(std::span<const double> coeffs, const WeightSequence& s_seq, double r);

/// 1/d <= a_j^2 / b_j <= d for j <= log_eigenvalues.size(), in log space.
/// The reported value is the ratio farthest from 1 on the log scale.
MembershipResult check_operator_membership(std::span<const double> log_eigenvalues, const WeightSequence& b_seq,
                                           double d);
MembershipResult check_operator_membership(const ProblemInstance& instance);

struct NoiseLevels {
  double nu = 0.0;   // noise level of Y
  double eps = 0.0;  // noise level of X

  NoiseLevels() = default;
  /// Throws ConfigError unless both levels lie in (0, 1).
  NoiseLevels(double nu_, double eps_);
};

/// J = min(ceil(1/nu), ceil(1/eps), j_cap).
std::size_t truncation_length(const NoiseLevels& noise, std::size_t j_cap = kDefaultJCap);

struct ObservationSet {
  std::vector<double> Y;
  std::vector<double> X;
  NoiseLevels noise;
  std::size_t J = 0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
};

/// Y_j = a_j [f]_j + sqrt(nu) xi_j,  X_j = a_j + sqrt(eps) eta_j  for j <= length.
/// Each draw depends only on (seed, replication, j, stream), so a shorter
/// length yields an exact prefix of a longer simulation. The default length
/// is min(truncation_length(noise), instance.J()).
ObservationSet simulate(const ProblemInstance& instance, const NoiseLevels& noise, std::uint64_t seed,
                        std::uint64_t replication, std::optional<std::size_t> length = std::nullopt);

}  // namespace seqinv
