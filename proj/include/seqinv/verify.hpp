#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqinv/adaptive.hpp"
#include "seqinv/estimator.hpp"
#include "seqinv/model.hpp"
#include "seqinv/oracle.hpp"

namespace seqinv {

struct LemmaCheckReport {
  std::string tag;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<std::string> notes;

  bool passed() const { return violations == 0; }
};

// ---------------------------------------------------------------------------
// Oracle inequality for the contrast selection.
// ---------------------------------------------------------------------------

inline constexpr double kKeyLemmaSlack = 1e-9;

/// Precomputed truth for repeated per-realization checks.
struct TruthTables {
  std::span<const double> coeffs;
  std::span<const double> omega;  // omega_j, j = 1..J
  std::span<const double> tail;   // bias_table
};

/**
 * For one realization f_1..f_K (est has dimension K) and a non-decreasing
 * positive penalty, recomputes the selected dimension and checks for every
 * 1 <= k <= K that
 *
 *   ||f_sel - f||^2 <= 7 pen_k + 78 beta_k^2 + 42 max_j (||f_j - f^(j)||^2 - pen_j / 6)_+
 *
 * with relative slack kKeyLemmaSlack. trials counts the k checked and
 * worst_margin is min_k (rhs_k - lhs) / rhs_k.
 */
LemmaCheckReport check_key_lemma(const EstimatorOutput& est, const TruthTables& truth, std::span<const double> pen);
LemmaCheckReport check_key_lemma(const EstimatorOutput& est, const ProblemInstance& instance,
                                 std::span<const double> pen, const WeightSequence& omega);

/// Randomized bundles: in-class instances of both families, random noise,
/// random K <= max_K and penalties built as cumulative sums of positive
/// (occasionally zero) increments.
LemmaCheckReport key_lemma_trials(std::size_t trials, std::uint64_t seed, std::size_t max_K = 50);

// ---------------------------------------------------------------------------
// Monte Carlo risk.
// ---------------------------------------------------------------------------

enum class EstimationMode { oracle, adaptive };
std::string_view to_string(EstimationMode mode);
EstimationMode parse_estimation_mode(std::string_view tag);

/// Oracle quantities for one noise point. K- uses the truncation length J.
OracleReport oracle_report(const ClassParams& params, const NoiseLevels& noise, std::size_t J,
                           std::optional<IllPosedness> family = std::nullopt);

struct McSettings {
  ProblemInstance instance;
  NoiseLevels noise;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  EstimationMode mode = EstimationMode::oracle;
  double penalty_constant = kDefaultPenaltyConstant;
  std::size_t j_cap = kDefaultJCap;
  unsigned workers = 1;
  std::optional<IllPosedness> family = std::nullopt;
  bool keep_risks = false;
};

struct RiskReport {
  double nu = 0.0;
  double eps = 0.0;
  EstimationMode mode = EstimationMode::oracle;
  std::size_t replications = 0;
  std::size_t J = 0;
  double risk_mean = 0.0;
  double risk_std_err = 0.0;
  double risk_median = 0.0;
  double median_lower = 0.0;  // distribution-free 95% interval for the median
  double median_upper = 0.0;
  std::size_t k_min = 0, k_median = 0, k_max = 0;  // k* (oracle) or k_hat (adaptive)
  std::size_t bound_min = 0, bound_max = 0;         // K_hat range (adaptive)
  OracleReport benchmark;
  double penalty_constant = kDefaultPenaltyConstant;
  // Adaptive mode diagnostics.
  std::size_t k_hat_out_of_range = 0;
  std::size_t key_lemma_violations = 0;
  double key_lemma_worst_margin = std::numeric_limits<double>::infinity();
  double benchmark_ratio = 0.0;  // risk_mean / (psi_diamond + upsilon + nu + eps)
  std::vector<double> risks;     // filled when keep_risks is set
};

/// Runs replications i = 0..R-1 (replication index i) of simulate -> estimate.
/// Results do not depend on the worker count.
RiskReport mc_risk(const McSettings& settings);

/// 4(6d + r) max(psi_nu, upsilon_eps).
double theorem22_bound(const ClassParams& params, const RiskReport& report);
/// riskMean - 3 SE <= theorem22_bound at every point.
LemmaCheckReport check_theorem22(const ClassParams& params, std::span<const RiskReport> reports);

// ---------------------------------------------------------------------------
// Rate fitting.
// ---------------------------------------------------------------------------

enum class RateRegressor { log_noise, log_abs_log_noise };

struct RateFit {
  std::vector<std::pair<double, double>> points;  // (regressor, log risk)
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double expected_slope = 0.0;
  RateRegressor regressor = RateRegressor::log_noise;
};

/// OLS of log risk on log noise (or log|log noise|). Throws DataError on fewer
/// than 3 points or a nonpositive risk.
RateFit rate_fit(std::span<const std::pair<double, double>> noise_and_risk, double expected_slope,
                 RateRegressor regressor = RateRegressor::log_noise);

// ---------------------------------------------------------------------------
// Ratio-deviation, delta-scale and event-frequency checks.
// ---------------------------------------------------------------------------

struct LemmaA1Row {
  std::size_t j = 0;
  double eps = 0.0;
  double a = 0.0;
  int item = 0;  // 1, 2, 3
  double estimate = 0.0;
  double std_err = 0.0;
  double bound = 0.0;
};

struct LemmaA1Report {
  LemmaCheckReport summary;
  std::vector<LemmaA1Row> rows;
};

/// MC estimates of E[(a/X - 1)^2 1(X^2 >= eps)], P[X^2 < eps] and
/// E[(a/X)^2 1(X^2 >= eps)] against min(1, 8 eps/a^2), min(1, 4 eps/a^2) and 4,
/// each allowed 3 standard errors.
LemmaA1Report check_lemma_A1(std::span<const std::size_t> js, const ProblemInstance& instance,
                             std::span<const double> eps_grid, std::size_t R, std::uint64_t seed);

struct LemmaA2Row {
  double nu = 0.0;
  std::size_t n_plus = 0;
  double delta = 0.0;
  double scaled = 0.0;  // nu * delta
  double bound = 0.0;   // 32 d^2
};

struct LemmaA2Report {
  LemmaCheckReport summary;
  std::vector<LemmaA2Row> rows;
};

/// nu delta^a_{N+} <= 32 d^2 with N+ the N-bound on sqrt(4d b) and a = sqrt(b).
LemmaA2Report check_lemma_A2(std::span<const double> nu_grid, const WeightSequence& omega, const WeightSequence& b,
                             double d);

struct EventRow {
  double nu = 0.0;
  double eps = 0.0;
  std::size_t replications = 0;
  double freq_tilde_c = 0.0;  // tilde Omega_{M+ + 1} fails
  double freq_eps_c = 0.0;    // Omega_eps fails
  double freq_mho_c = 0.0;    // mho fails
  double se_tilde_c = 0.0, se_eps_c = 0.0, se_mho_c = 0.0;
  double implied_tilde = 0.0, implied_eps = 0.0;  // freq / eps^2
  std::size_t sandwich_failures_on_omega_eps = 0;
  std::size_t bracket_failures_on_omega_tilde = 0;
  std::size_t omega_eps_count = 0, omega_tilde_count = 0;
};

struct EventScanReport {
  LemmaCheckReport summary;
  std::vector<EventRow> rows;
};

/// Event frequencies per grid point (nu taken from the paired noise levels),
/// asserting they do not increase along a decreasing eps grid unless the
/// 3-SE error bars overlap.
EventScanReport event_probability_scan(const ProblemInstance& instance, std::span<const NoiseLevels> grid,
                                       std::size_t R, std::uint64_t seed, const PenaltyConstants& constants = {},
                                       unsigned workers = 1);

}  // namespace seqinv
