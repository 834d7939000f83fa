#pragma once

#include <span>
#include <vector>

#include "seqinv/model.hpp"
#include "seqinv/weights.hpp"

namespace seqinv {

/// Thresholded orthogonal series estimate f_k.
struct EstimatorOutput {
  std::size_t k = 0;
  std::vector<double> coeffs;        // c_j = (Y_j / X_j) 1[X_j^2 >= eps], j <= k
  std::vector<double> prefix_norms;  // S_m = sum_{l<=m} omega_l c_l^2, m <= k

  /// ||f_j - f_m||_omega^2 for j >= m, from the telescoping identity.
  double distance_sq(std::size_t j, std::size_t m) const;
  /// The estimate with dimension m <= k (a prefix of this one).
  EstimatorOutput truncated(std::size_t m) const;
};

/// (Y/X) 1[X^2 >= eps]; no division happens below the threshold.
inline double coefficient(double y, double x, double eps) { return x * x >= eps ? y / x : 0.0; }

/// Throws IndexDomainError unless 1 <= k <= Y.size().
EstimatorOutput estimate(std::span<const double> Y, std::span<const double> X, double eps, std::size_t k,
                         const WeightSequence& omega);
EstimatorOutput estimate(const ObservationSet& obs, std::size_t k, const WeightSequence& omega);

/// Suffix sums tail[k] = sum_{k < l <= J} omega_l [f]_l^2 for k = 0..J.
std::vector<double> bias_table(const ProblemInstance& instance, const WeightSequence& omega);

/// beta_k^2 = sup_{j >= k} ||f - f_j||_omega^2, which equals the tail sum at k.
double projection_bias_sq(const ProblemInstance& instance, const WeightSequence& omega, std::size_t k);

/// ||f_k - f||_omega^2 against the truth on 1..J.
double risk_error_sq(const EstimatorOutput& est, const ProblemInstance& instance, const WeightSequence& omega);
/// Same with a precomputed bias_table and omega table (hot path of the Monte Carlo loops).
double risk_error_sq(const EstimatorOutput& est, std::span<const double> truth, std::span<const double> omega_table,
                     std::span<const double> tail);

}  // namespace seqinv
