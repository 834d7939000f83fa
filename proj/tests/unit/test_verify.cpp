#include <gtest/gtest.h>

#include <cmath>

#include "brute_force.hpp"
#include "seqinv/errors.hpp"
#include "seqinv/numeric.hpp"
#include "seqinv/verify.hpp"

using namespace seqinv;

namespace {

ProblemInstance mild_instance(SolutionKind kind, std::size_t J) {
  return make_instance(kind, OperatorKind::mid_class, ClassParams::mild(1, 1, 0, 1, 2), J);
}

}  // namespace

TEST(KeyLemma, NoiseFreeStub) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 20);
  std::vector<double> Y, X;
  for (std::size_t j = 0; j < 20; ++j) {
    Y.push_back(inst.eigenvalues[j] * inst.coeffs[j]);
    X.push_back(inst.eigenvalues[j]);
  }
  const auto est = estimate(Y, X, 1e-6, 10, inst.params.omega_seq);
  const std::vector<double> pen(10, 0.001);
  const auto rep = check_key_lemma(est, inst, pen, inst.params.omega_seq);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.trials, 10u);
  EXPECT_GT(rep.worst_margin, 0.0);
}

TEST(KeyLemma, SingleDimension) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 30);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto obs = simulate(inst, NoiseLevels(0.05, 0.05), 13, i);
    const auto est = estimate(obs, 1, inst.params.omega_seq);
    const std::vector<double> pen{0.01 + 0.001 * double(i)};
    // Expanded by hand: lhs = e1 + tail1, rhs = 7 pen + 78 tail1 + 42 (e1 - pen/6)_+.
    const double e1 = std::pow(est.coeffs[0] - inst.coeffs[0], 2);
    const double tail = projection_bias_sq(inst, inst.params.omega_seq, 1);
    const double rhs = 7 * pen[0] + 78 * tail + 42 * std::max(0.0, e1 - pen[0] / 6);
    EXPECT_LE(e1 + tail, rhs);
    EXPECT_TRUE(check_key_lemma(est, inst, pen, inst.params.omega_seq).passed());
  }
}

TEST(KeyLemma, RejectsInvalidPenalty) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 5);
  const auto est = estimate(simulate(inst, NoiseLevels(0.1, 0.1), 1, 0), 3, inst.params.omega_seq);
  EXPECT_THROW(check_key_lemma(est, inst, std::vector<double>{0.3, 0.2, 0.4}, inst.params.omega_seq), DataError);
  EXPECT_THROW(check_key_lemma(est, inst, std::vector<double>{0.3, 0.4}, inst.params.omega_seq), IndexDomainError);
}

TEST(KeyLemma, RandomBundles) {
  const auto rep = key_lemma_trials(3000, 99, 50);
  EXPECT_EQ(rep.trials, 3000u);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_GT(rep.worst_margin, 0.0);
}

TEST(McRisk, SingleReplicationEqualsOneEvaluation) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 1000);
  const NoiseLevels noise(1e-3, 1e-3);
  McSettings cfg{.instance = inst, .noise = noise};
  cfg.seed = 5;
  const auto rep = mc_risk(cfg);
  const auto obs = simulate(inst, noise, 5, 0, rep.benchmark.k_star);
  const auto est = estimate(obs, rep.benchmark.k_star, inst.params.omega_seq);
  EXPECT_EQ(rep.risk_mean, risk_error_sq(est, inst, inst.params.omega_seq));
  EXPECT_EQ(rep.risk_std_err, 0.0);
}

TEST(McRisk, WorkerCountInvariance) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 1000);
  for (auto mode : {EstimationMode::oracle, EstimationMode::adaptive}) {
    McSettings cfg{.instance = inst, .noise = NoiseLevels(1e-3, 1e-3)};
    cfg.replications = 300;
    cfg.seed = 6;
    cfg.mode = mode;
    cfg.keep_risks = true;
    const auto one = mc_risk(cfg);
    cfg.workers = 8;
    const auto eight = mc_risk(cfg);
    EXPECT_EQ(one.risk_mean, eight.risk_mean);
    EXPECT_EQ(one.risk_std_err, eight.risk_std_err);
    EXPECT_EQ(one.risks, eight.risks);
    EXPECT_EQ(one.k_median, eight.k_median);
  }
}

TEST(McRisk, VarianceHalvesWithDoubledReplications) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 1000);
  const auto spread = [&](std::size_t R) {
    std::vector<double> means;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      McSettings cfg{.instance = inst, .noise = NoiseLevels(1e-2, 1e-2)};
      cfg.replications = R;
      cfg.seed = 1000 + seed;
      means.push_back(mc_risk(cfg).risk_mean);
    }
    double m = 0.0, v = 0.0;
    for (double x : means) m += x;
    m /= double(means.size());
    for (double x : means) v += (x - m) * (x - m);
    return v / double(means.size() - 1);
  };
  const double ratio = spread(100) / spread(200);
  EXPECT_GT(ratio, 1.3);
  EXPECT_LT(ratio, 3.0);
}

TEST(McRisk, AdaptiveDiagnostics) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 1000);
  McSettings cfg{.instance = inst, .noise = NoiseLevels(1e-3, 1e-3)};
  cfg.replications = 300;
  cfg.mode = EstimationMode::adaptive;
  for (double c : {600.0, 1.0}) {
    cfg.penalty_constant = c;
    const auto rep = mc_risk(cfg);
    EXPECT_EQ(rep.key_lemma_violations, 0u);
    EXPECT_EQ(rep.k_hat_out_of_range, 0u);
    EXPECT_TRUE(std::isfinite(rep.benchmark_ratio));
    EXPECT_GE(rep.k_min, 1u);
    EXPECT_LE(rep.k_max, rep.bound_max);
    EXPECT_LE(rep.median_lower, rep.risk_median);
    EXPECT_GE(rep.median_upper, rep.risk_median);
  }
}

TEST(RiskBound, BoundHoldsOnGrid) {
  for (const auto& params : {ClassParams::mild(1, 1, 0, 1, 2), ClassParams::severe(1, 1, 0, 1, 2)}) {
    const auto inst = make_instance(SolutionKind::boundary_spread, OperatorKind::mid_class, params, 1000);
    McSettings cfg{.instance = inst, .noise = NoiseLevels(1e-3, 1e-3)};
    cfg.replications = 2000;
    const auto rep = mc_risk(cfg);
    EXPECT_NEAR(theorem22_bound(params, rep), 52.0 * std::max(rep.benchmark.psi_nu, rep.benchmark.upsilon_eps),
                1e-12);
    const std::vector<RiskReport> reports{rep};
    EXPECT_TRUE(check_theorem22(params, reports).passed());
  }
}

TEST(RiskBound, TrivialNearUnitNoise) {
  const auto params = ClassParams::mild(1, 1, 0, 1, 2);
  const auto inst = make_instance(SolutionKind::boundary_single, OperatorKind::mid_class, params, 10);
  McSettings cfg{.instance = inst, .noise = NoiseLevels(0.9, 0.9)};
  cfg.replications = 500;
  const auto rep = mc_risk(cfg);
  EXPECT_EQ(rep.benchmark.k_star, 1u);
  EXPECT_GE(theorem22_bound(params, rep), 52.0);
  const std::vector<RiskReport> reports{rep};
  EXPECT_TRUE(check_theorem22(params, reports).passed());
}

TEST(RateFit, PlantedPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double nu = 1e-2; nu >= 1e-6; nu /= 3) pts.emplace_back(nu, 3.0 * std::pow(nu, 0.4));
  const auto fit = rate_fit(pts, 0.4);
  EXPECT_NEAR(fit.slope, 0.4, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-10);
  EXPECT_NEAR(fit.residual_rms, 0.0, 1e-12);

  std::vector<std::pair<double, double>> severe;
  for (double nu = 1e-2; nu >= 1e-8; nu /= 10) severe.emplace_back(nu, std::pow(std::log(1 / nu), -1.0));
  EXPECT_NEAR(rate_fit(severe, -1.0, RateRegressor::log_abs_log_noise).slope, -1.0, 1e-12);
}

TEST(RateFit, Errors) {
  const std::vector<std::pair<double, double>> two{{0.1, 1.0}, {0.01, 0.5}};
  EXPECT_THROW(rate_fit(two, 0.4), DataError);
  const std::vector<std::pair<double, double>> zero{{0.1, 1.0}, {0.01, 0.0}, {0.001, 0.2}};
  EXPECT_THROW(rate_fit(zero, 0.4), DataError);
}

TEST(RatioDeviation, Examples) {
  ProblemInstance inst;
  inst.params = ClassParams::mild(1, 1, 0, 1, 2);
  inst.coeffs = {0.0, 0.0};
  inst.eigenvalues = {1.0, 0.5};
  inst.log_eigenvalues = {0.0, std::log(0.5)};
  const std::vector<std::size_t> j1{1}, j2{2};

  const std::vector<double> tiny{1e-6};
  const auto far = check_lemma_A1(j1, inst, tiny, 20000, 1);
  EXPECT_TRUE(far.summary.passed());
  EXPECT_EQ(far.rows[1].item, 2);
  EXPECT_EQ(far.rows[1].estimate, 0.0);

  const std::vector<double> eps{0.04};
  const auto mid = check_lemma_A1(j2, inst, eps, 100000, 2);
  EXPECT_TRUE(mid.summary.passed());
  ASSERT_EQ(mid.rows.size(), 3u);
  EXPECT_NEAR(mid.rows[0].bound, std::min(1.0, 8 * 0.04 / 0.25), 1e-15);
  EXPECT_NEAR(mid.rows[1].bound, std::min(1.0, 4 * 0.04 / 0.25), 1e-15);
  EXPECT_DOUBLE_EQ(mid.rows[2].bound, 4.0);

  // a^2 <= 4 eps saturates the probability bound.
  const std::vector<double> big{0.1};
  const auto sat = check_lemma_A1(j2, inst, big, 5000, 3);
  EXPECT_DOUBLE_EQ(sat.rows[1].bound, 1.0);
  EXPECT_TRUE(sat.summary.passed());
}

TEST(DeltaScale, BothFamilies) {
  const std::vector<double> grid{0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const auto mild = ClassParams::mild(1, 1, 0, 1, 2);
  const auto rep = check_lemma_A2(grid, mild.omega_seq, mild.b_seq, mild.d);
  EXPECT_TRUE(rep.summary.passed());
  for (const auto& row : rep.rows) {
    const auto n = brute::n_bound([](std::size_t j) { return 8.0 / double(j * j); }, row.nu, brute::power(0));
    EXPECT_EQ(row.n_plus, n);
    const auto [Delta, dl] = brute::delta(n, brute::power(-2), brute::power(0));
    EXPECT_NEAR(row.scaled, row.nu * dl, 1e-12 * row.nu * dl);
    EXPECT_LE(row.scaled, 128.0);
  }
  const auto severe = ClassParams::severe(1, 1, 0, 1, 2);
  EXPECT_TRUE(check_lemma_A2(grid, severe.omega_seq, severe.b_seq, severe.d).summary.passed());
}

TEST(EventScan, ExactOperatorHasNoFailures) {
  ClassParams params;
  params.d = 1.0;
  params.s_seq = WeightSequence::sobolev(1);
  params.b_seq = WeightSequence::constant();
  params.omega_seq = WeightSequence::constant();
  const auto inst = make_instance(SolutionKind::boundary_spread, OperatorKind::mid_class, params, 100);
  const std::vector<NoiseLevels> grid{NoiseLevels(1e-2, 1e-8)};
  const auto rep = event_probability_scan(inst, grid, 200, 1);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].freq_tilde_c, 0.0);
  EXPECT_EQ(rep.rows[0].freq_eps_c, 0.0);
  EXPECT_EQ(rep.rows[0].freq_mho_c, 0.0);
}

TEST(EventScan, MonotoneOnMildGrid) {
  const auto inst = mild_instance(SolutionKind::boundary_spread, 1000);
  const std::vector<NoiseLevels> grid{NoiseLevels(1e-3, 1e-3), NoiseLevels(1e-1, 1e-1), NoiseLevels(1e-2, 1e-2)};
  const auto rep = event_probability_scan(inst, grid, 1000, 2, {}, 4);
  EXPECT_TRUE(rep.summary.passed());
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(rep.rows[0].eps, 1e-1);  // sorted by decreasing eps
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(std::isfinite(row.implied_tilde));
    EXPECT_TRUE(std::isfinite(row.implied_eps));
    EXPECT_NEAR(row.implied_eps, row.freq_eps_c / (row.eps * row.eps), 1e-9 * row.implied_eps + 1e-300);
  }
}
