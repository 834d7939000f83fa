#include <gtest/gtest.h>

#include <cmath>

#include "seqinv/errors.hpp"
#include "seqinv/estimator.hpp"

using namespace seqinv;

namespace {

ProblemInstance custom_instance(std::vector<double> coeffs) {
  ProblemInstance inst;
  inst.params = ClassParams::mild(1, 1, 0, 1, 2);
  inst.coeffs = std::move(coeffs);
  for (std::size_t j = 1; j <= inst.coeffs.size(); ++j) {
    inst.eigenvalues.push_back(1.0 / j);
    inst.log_eigenvalues.push_back(-std::log(double(j)));
  }
  return inst;
}

}  // namespace

TEST(Coefficient, Threshold) {
  EXPECT_DOUBLE_EQ(coefficient(0.5, 0.5, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(coefficient(0.5, 0.1, 0.25), 0.0);
  EXPECT_DOUBLE_EQ(coefficient(0.0, 0.9, 0.25), 0.0);
  EXPECT_DOUBLE_EQ(coefficient(1.0, 0.0, 0.25), 0.0);
}

TEST(Estimate, NoiseFreeInversion) {
  const std::vector<double> f{0.7, -0.2, 0.05, 0.01};
  const std::vector<double> a{1.0, 0.5, 0.3, 0.25};
  std::vector<double> Y;
  for (std::size_t j = 0; j < f.size(); ++j) Y.push_back(a[j] * f[j]);
  const auto est = estimate(Y, a, 0.01, 4, WeightSequence::constant());
  for (std::size_t j = 0; j < f.size(); ++j) EXPECT_DOUBLE_EQ(est.coeffs[j], f[j]);
}

TEST(Estimate, IndexDomain) {
  const std::vector<double> Y{1, 2, 3}, X{1, 1, 1};
  EXPECT_THROW(estimate(Y, X, 0.1, 0, WeightSequence::constant()), IndexDomainError);
  EXPECT_THROW(estimate(Y, X, 0.1, 4, WeightSequence::constant()), IndexDomainError);
}

TEST(Estimate, PrefixNormsByDirectSum) {
  const auto inst = custom_instance({1.0, 0.5, 0.25, 0.1});
  const auto obs = simulate(inst, NoiseLevels(0.05, 0.01), 21, 0);
  const auto est = estimate(obs, 3, WeightSequence::constant());
  double direct = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double c = obs.X[j] * obs.X[j] >= 0.01 ? obs.Y[j] / obs.X[j] : 0.0;
    EXPECT_DOUBLE_EQ(est.coeffs[j], c);
    direct += c * c;
  }
  EXPECT_NEAR(est.prefix_norms[2], direct, 1e-15 * direct);
  for (std::size_t m = 1; m < 3; ++m) EXPECT_LE(est.prefix_norms[m - 1], est.prefix_norms[m]);
}

TEST(Estimate, ThresholdZeroesCoefficients) {
  const std::vector<double> Y{1.0, 1.0, 1.0}, X{1.0, 0.01, -0.5};
  const auto est = estimate(Y, X, 0.04, 3, WeightSequence::constant());
  EXPECT_DOUBLE_EQ(est.coeffs[1], 0.0);
  EXPECT_DOUBLE_EQ(est.coeffs[2], -2.0);
}

TEST(Estimate, TelescopingIdentity) {
  const auto inst = custom_instance({1.0, 0.5, 0.25, 0.1, 0.05, 0.02});
  const auto omega = WeightSequence::sobolev(0.5);
  const auto obs = simulate(inst, NoiseLevels(0.05, 0.01), 22, 0);
  const auto est = estimate(obs, 6, omega);
  for (std::size_t k = 1; k <= 6; ++k)
    for (std::size_t j = k; j <= 6; ++j) {
      double direct = 0.0;
      for (std::size_t l = k + 1; l <= j; ++l) direct += omega(l) * est.coeffs[l - 1] * est.coeffs[l - 1];
      EXPECT_NEAR(est.distance_sq(j, k), direct, 1e-12);
    }
  const auto cut = est.truncated(2);
  EXPECT_EQ(cut.k, 2u);
  EXPECT_EQ(cut.coeffs[1], est.coeffs[1]);
}

TEST(Bias, Examples) {
  const auto inst = custom_instance({0.0, 1.0, 0.0});
  const auto omega = WeightSequence::custom_table({1, 4, 9});
  EXPECT_DOUBLE_EQ(projection_bias_sq(inst, omega, 1), 4.0);
  EXPECT_DOUBLE_EQ(projection_bias_sq(inst, omega, 2), 0.0);
  EXPECT_DOUBLE_EQ(projection_bias_sq(inst, omega, 3), 0.0);
}

TEST(Bias, BoundarySpreadTailAndSupScan) {
  const auto params = ClassParams::mild(1, 1, 0.5, 1, 2);
  const auto inst = make_instance(SolutionKind::boundary_spread, OperatorKind::mid_class, params, 10);
  double tail = 0.0;
  for (std::size_t l = 3; l <= 10; ++l) tail += double(l) * inst.coeffs[l - 1] * inst.coeffs[l - 1];
  EXPECT_NEAR(projection_bias_sq(inst, params.omega_seq, 2), tail, 1e-15);
  // The sup over j >= k of the tail sums is attained at j = k.
  for (std::size_t k = 1; k <= 10; ++k) {
    double sup = 0.0;
    for (std::size_t j = k; j <= 10; ++j) {
      double t = 0.0;
      for (std::size_t l = j + 1; l <= 10; ++l) t += double(l) * inst.coeffs[l - 1] * inst.coeffs[l - 1];
      sup = std::max(sup, t);
    }
    EXPECT_NEAR(projection_bias_sq(inst, params.omega_seq, k), sup, 1e-15);
    if (k > 1) EXPECT_LE(projection_bias_sq(inst, params.omega_seq, k), projection_bias_sq(inst, params.omega_seq, k - 1));
  }
}

TEST(Risk, Examples) {
  const auto inst = custom_instance({0.5, -0.25, 0.125});
  const auto omega = WeightSequence::custom_table({1, 2, 3});
  EstimatorOutput exact{3, inst.coeffs, {}};
  EXPECT_DOUBLE_EQ(risk_error_sq(exact, inst, omega), 0.0);
  EstimatorOutput zero{3, {0, 0, 0}, {}};
  EXPECT_DOUBLE_EQ(risk_error_sq(zero, inst, omega), 0.25 + 2 * 0.0625 + 3 * 0.015625);
  EstimatorOutput some{2, {0.4, 0.0}, {}};
  // 1 (0.1)^2 + 2 (0.25)^2 + 3 (0.125)^2
  EXPECT_NEAR(risk_error_sq(some, inst, omega), 0.01 + 0.125 + 0.046875, 1e-15);
}

TEST(Risk, IncrementIdentity) {
  const auto inst = custom_instance({1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01});
  const auto omega = WeightSequence::sobolev(0.5);
  const auto obs = simulate(inst, NoiseLevels(0.02, 0.01), 23, 0);
  const auto full = estimate(obs, 7, omega);
  for (std::size_t k = 1; k <= 7; ++k)
    for (std::size_t kp = k; kp <= 7; ++kp) {
      double diff = 0.0;
      for (std::size_t j = k + 1; j <= kp; ++j) {
        const double c = full.coeffs[j - 1], f = inst.coeffs[j - 1];
        diff += omega(j) * ((c - f) * (c - f) - f * f);
      }
      EXPECT_NEAR(risk_error_sq(full.truncated(kp), inst, omega) - risk_error_sq(full.truncated(k), inst, omega), diff,
                  1e-12);
    }
}
