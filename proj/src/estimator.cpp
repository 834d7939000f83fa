#include "seqinv/estimator.hpp"

#include <string>

#include "seqinv/errors.hpp"
#include "seqinv/numeric.hpp"

namespace seqinv {

double EstimatorOutput::distance_sq(std::size_t j, std::size_t m) const {
  if (m == 0) return j == 0 ? 0.0 : prefix_norms.at(j - 1);
  return prefix_norms.at(j - 1) - prefix_norms.at(m - 1);
}

EstimatorOutput EstimatorOutput::truncated(std::size_t m) const {
  if (m < 1 || m > k) throw IndexDomainError("cannot truncate an estimate of dimension " + std::to_string(k) +
                                             " to " + std::to_string(m));
  EstimatorOutput out;
  out.k = m;
  out.coeffs.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(m));
  out.prefix_norms.assign(prefix_norms.begin(), prefix_norms.begin() + static_cast<std::ptrdiff_t>(m));
  return out;
}

EstimatorOutput estimate(std::span<const double> Y, std::span<const double> X, double eps, std::size_t k,
                         const WeightSequence& omega) {
  if (k < 1 || k > Y.size() || k > X.size())
    throw IndexDomainError("estimator dimension " + std::to_string(k) + " outside 1.." + std::to_string(Y.size()));
  EstimatorOutput out;
  out.k = k;
  out.coeffs.resize(k);
  out.prefix_norms.resize(k);
  double running = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const double c = coefficient(Y[j - 1], X[j - 1], eps);
    out.coeffs[j - 1] = c;
    running += omega(static_cast<std::int64_t>(j)) * c * c;
    out.prefix_norms[j - 1] = running;
  }
  return out;
}

EstimatorOutput estimate(const ObservationSet& obs, std::size_t k, const WeightSequence& omega) {
  return estimate(obs.Y, obs.X, obs.noise.eps, k, omega);
}

std::vector<double> bias_table(const ProblemInstance& instance, const WeightSequence& omega) {
  const std::size_t J = instance.J();
  std::vector<double> tail(J + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t l = J; l >= 1; --l) {
    const double c = instance.coeffs[l - 1];
    if (c != 0.0) acc.add(omega(static_cast<std::int64_t>(l)) * c * c);
    tail[l - 1] = acc.value();
  }
  return tail;
}

double projection_bias_sq(const ProblemInstance& instance, const WeightSequence& omega, std::size_t k) {
  if (k < 1 || k > instance.J())
    throw IndexDomainError("bias dimension " + std::to_string(k) + " outside 1.." + std::to_string(instance.J()));
  return bias_table(instance, omega)[k];
}

double risk_error_sq(const EstimatorOutput& est, std::span<const double> truth, std::span<const double> omega_table,
                     std::span<const double> tail) {
  if (est.k > truth.size())
    throw IndexDomainError("estimate dimension exceeds the instance length");
  CompensatedSum acc;
  for (std::size_t j = 1; j <= est.k; ++j) {
    const double diff = est.coeffs[j - 1] - truth[j - 1];
    acc.add(omega_table[j - 1] * diff * diff);
  }
  acc.add(tail[est.k]);
  return acc.value();
}

double risk_error_sq(const EstimatorOutput& est, const ProblemInstance& instance, const WeightSequence& omega) {
  const auto tail = bias_table(instance, omega);
  const auto w = omega.table(est.k);
  return risk_error_sq(est, instance.coeffs, w, tail);
}

}  // namespace seqinv
