#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "seqinv/estimator.hpp"
#include "seqinv/model.hpp"
#include "seqinv/weights.hpp"

namespace seqinv {

inline constexpr double kDefaultPenaltyConstant = 600.0;
inline constexpr double kDefaultDeterministicPenaltyConstant = 60.0;

/// v_eps = 1 / (8 log(log(1/eps + 20))).
double v_eps(double eps);

enum class AlphaTag { observed_x, eigenvalues, upper_operator, lower_operator, operator_center };
std::string_view to_string(AlphaTag tag);

/**
 * Sequence alpha feeding Delta/delta and the dimension scans, stored as
 * log(alpha_j^2) so exp-decay operators never underflow. alpha_j = 0 maps to
 * -inf, which makes Delta infinite from that index on.
 */
class AlphaSequence {
 public:
  /// alpha = X (data-driven penalty and bounds).
  static AlphaSequence observed(std::span<const double> x);
  /// alpha = a, given log a_j.
  static AlphaSequence eigenvalues(std::span<const double> log_a);
  /// alpha = sqrt(factor * b): factor 4d gives the upper bounds, 1/(4d) the lower, 1 the class center.
  static AlphaSequence scaled_operator(const WeightSequence& b, double factor, AlphaTag tag);

  double log_sq(std::size_t j) const;  // log(alpha_j^2), j >= 1
  std::optional<std::size_t> size() const { return size_; }
  AlphaTag tag() const { return tag_; }

 private:
  std::function<double(std::size_t)> log_sq_;
  std::optional<std::size_t> size_;
  AlphaTag tag_ = AlphaTag::observed_x;
};

struct DeltaValue {
  double Delta = 0.0;      // max_{j<=k} omega_j / alpha_j^2
  double delta = 0.0;      // k Delta log(Delta v (k+2)) / log(k+2)
  double log_Delta = 0.0;
  double log_delta = 0.0;
};

/// Throws DataError if some alpha_j, j <= k, is zero.
DeltaValue delta(std::size_t k, const AlphaSequence& alpha, const WeightSequence& omega);

struct PenaltyTable {
  AlphaTag alpha_tag = AlphaTag::observed_x;
  std::vector<double> Delta;
  std::vector<double> delta;
  std::vector<double> pen;  // constant * delta_k * nu
  double penalty_constant = kDefaultPenaltyConstant;
};

/// Delta, delta and pen for k = 1..K. A zero alpha_j gives +inf from j on.
PenaltyTable penalty_table(const AlphaSequence& alpha, const WeightSequence& omega, double nu, std::size_t K,
                           double constant);

/// pen_k = constant * delta_k^X * nu.
double pen_hat(const ObservationSet& obs, std::size_t k, const WeightSequence& omega,
               double constant = kDefaultPenaltyConstant);

struct AlphaBounds {
  std::size_t N = 1;
  std::size_t M = 1;
  std::size_t K = 1;
  // False if K depends on alpha beyond its stored length. N or M may still be
  // lower bounds when K is exact.
  bool complete = true;
};

/// N°_nu = max{1 <= N <= floor(1/nu) : max_{j<=N} omega_j <= 1/nu}, clipped to J.
std::size_t n_circ(double nu, const WeightSequence& omega, std::size_t J);

struct BoundScan {
  std::size_t value = 1;
  bool complete = true;
};

/// N = min{2 <= j <= N° : alpha_j^2 / (j omega+_j) <= nu |log nu|} - 1, else N°.
BoundScan n_bound(const AlphaSequence& alpha, double nu, const WeightSequence& omega, std::size_t J);
/// M = min{2 <= j <= floor(1/eps) : alpha_j^2 <= eps^{1 - v_eps}} - 1, else floor(1/eps); clipped to J.
BoundScan m_bound(const AlphaSequence& alpha, double eps, std::size_t J);

/// N, M and K = min(N, M) for one alpha sequence. Scan ranges are clipped to J.
AlphaBounds alpha_bounds(const AlphaSequence& alpha, double nu, double eps, const WeightSequence& omega,
                         std::size_t J);

/// Operator class (b, d) for the deterministic counterparts K+ and K-.
struct OperatorClass {
  WeightSequence b;
  double d = 1.0;
};

struct DimensionBounds {
  std::size_t n_circ = 1;
  double v_eps = 0.0;
  AlphaBounds hat;                   // alpha = X
  std::optional<AlphaBounds> minus;  // alpha = sqrt(b / (4d))
  std::optional<AlphaBounds> plus;   // alpha = sqrt(4d b)
  std::vector<double> omega_plus;    // max_{j<=k} omega_j for k <= max(K_hat, K+)
};

/// scan_limit is the truncation length J the scans are clipped to; it
/// defaults to obs.J. A larger limit than the stored prefix may leave the
/// data-driven scan incomplete (see AlphaBounds::complete).
DimensionBounds dimension_bounds(const ObservationSet& obs, const WeightSequence& omega,
                                 const std::optional<OperatorClass>& op = std::nullopt,
                                 std::optional<std::size_t> scan_limit = std::nullopt);

struct SelectionTrace {
  std::vector<double> contrast;   // Psi_k, k <= K
  std::vector<double> penalized;  // Psi_k + pen_k
  std::size_t k_hat = 1;
};

/// Psi_k = max_{k<=j<=K} (S_j - S_k - pen_j); k_hat the smallest minimizer of
/// Psi_k + pen_k. One backward sweep over max_{j>=k} (S_j - pen_j).
SelectionTrace contrast_and_select(std::span<const double> prefix_norms, std::span<const double> pen);

struct AdaptiveResult {
  EstimatorOutput at_bound;  // f_k for k = K_hat
  EstimatorOutput selected;  // f_{k_hat}
  PenaltyTable penalty;
  SelectionTrace trace;
  DimensionBounds bounds;
};

/// Data-driven bounds, penalty on alpha = X, estimate at K_hat, contrast selection.
AdaptiveResult adaptive_estimate(const ObservationSet& obs, const WeightSequence& omega,
                                 double penalty_constant = kDefaultPenaltyConstant,
                                 const std::optional<OperatorClass>& op = std::nullopt,
                                 std::optional<std::size_t> scan_limit = std::nullopt);

struct EventFlags {
  bool omega_eps = false;    // Omega_eps
  bool omega_tilde = false;  // tilde Omega_{M+ + 1}
  bool mho = false;          // penalty sandwich on k <= K+ and K- <= K_hat <= K+
  bool sandwich = false;     // first part of mho alone
  bool bracket = false;      // second part of mho alone
  std::size_t m_plus = 0;
  std::size_t k_plus = 0;
  std::size_t k_minus = 0;
  std::size_t k_hat = 0;
};

struct PenaltyConstants {
  double data_driven = kDefaultPenaltyConstant;
  double deterministic = kDefaultDeterministicPenaltyConstant;
};

/// Observation prefix length event_flags needs: max(K+, M+ + 1, K_hat scan).
std::size_t event_prefix_length(double nu, double eps, const WeightSequence& omega, const OperatorClass& op,
                                 std::size_t J);

/// Diagnostic events against the true eigenvalues (given as log a_j). The
/// observation set must cover event_prefix_length indices or the true J.
EventFlags event_flags(const ObservationSet& obs, std::span<const double> log_a, const WeightSequence& omega,
                       const OperatorClass& op, const PenaltyConstants& constants = {},
                       std::optional<std::size_t> scan_limit = std::nullopt);

struct ConditionLReport {
  std::vector<double> eps;
  std::vector<std::size_t> m_plus;
  std::vector<double> log_values;  // log of eps^-7 b_{M+ + 1}^{-1/2} exp(-b_{M+ + 1} / (72 eps d))
  double L = 0.0;                  // max over the grid
  bool growing = false;            // values increase along the refinement
};

/// Evaluates the M+ tail condition over an eps grid, reading M+ as the
/// M-bound on sqrt(4 d b) and the width as d.
ConditionLReport check_condition_L(const WeightSequence& b, double d, std::span<const double> eps_grid);

}  // namespace seqinv
