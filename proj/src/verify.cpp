#include "seqinv/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "parallel.hpp"
#include "seqinv/errors.hpp"
#include "seqinv/numeric.hpp"
#include "seqinv/rng.hpp"

namespace seqinv {

// ---------------------------------------------------------------------------
// Key lemma
// ---------------------------------------------------------------------------

LemmaCheckReport check_key_lemma(const EstimatorOutput& est, const TruthTables& truth, std::span<const double> pen) {
  const std::size_t K = est.k;
  if (K < 1 || pen.size() < K || truth.coeffs.size() < K || truth.omega.size() < K)
    throw IndexDomainError("key lemma inputs shorter than the estimator dimension");
  for (std::size_t k = 1; k <= K; ++k) {
    if (!(pen[k - 1] > 0.0)) throw DataError("key lemma penalty must be positive");
    if (k > 1 && pen[k - 1] < pen[k - 2]) throw DataError("key lemma penalty must be non-decreasing");
  }

  const auto pen_k = pen.first(K);
  const auto trace = contrast_and_select(est.prefix_norms, pen_k);

  // err[j] = ||f_j - f^(j)||^2, the stochastic part of the first j coordinates.
  std::vector<double> err(K + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t j = 1; j <= K; ++j) {
    const double diff = est.coeffs[j - 1] - truth.coeffs[j - 1];
    acc.add(truth.omega[j - 1] * diff * diff);
    err[j] = acc.value();
  }
  double excess = 0.0;
  for (std::size_t j = 1; j <= K; ++j) excess = std::max(excess, err[j] - pen_k[j - 1] / 6.0);

  const double lhs = err[trace.k_hat] + truth.tail[trace.k_hat];
  LemmaCheckReport report;
  report.tag = "key-lemma";
  for (std::size_t k = 1; k <= K; ++k) {
    const double rhs = 7.0 * pen_k[k - 1] + 78.0 * truth.tail[k] + 42.0 * excess;
    ++report.trials;
    if (lhs > rhs * (1.0 + kKeyLemmaSlack)) ++report.violations;
    report.worst_margin = std::min(report.worst_margin, (rhs - lhs) / rhs);
  }
  return report;
}

LemmaCheckReport check_key_lemma(const EstimatorOutput& est, const ProblemInstance& instance,
                                 std::span<const double> pen, const WeightSequence& omega) {
  const auto omega_table = omega.table(instance.J());
  const auto tail = bias_table(instance, omega);
  return check_key_lemma(est, TruthTables{instance.coeffs, omega_table, tail}, pen);
}

namespace {

struct Bundle {
  ProblemInstance instance;
  EstimatorOutput est;
  std::vector<double> pen;
};

Bundle random_bundle(std::uint64_t seed, std::uint64_t trial, std::size_t max_K) {
  DrawSequence rng(seed, trial);
  const bool severe = rng.uniform() < 0.5;
  const double p = rng.uniform(0.5, 2.0);
  const double s = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, p);
  const double b = severe ? rng.uniform(0.25, 1.0) : rng.uniform(0.25, 2.0);
  const double r = rng.log_uniform(0.1, 10.0);
  const double d = rng.uniform(1.0, 4.0);
  const auto params = severe ? ClassParams::severe(p, b, s, r, d) : ClassParams::mild(p, b, s, r, d);

  const std::size_t K = rng.index(1, max_K);
  const std::size_t J = K + rng.index(0, 20);

  Bundle bundle;
  auto& inst = bundle.instance;
  inst.params = params;
  inst.coeffs.resize(J);
  inst.eigenvalues.resize(J);
  inst.log_eigenvalues.resize(J);
  const double decay = rng.uniform(0.0, 1.0);
  for (std::size_t j = 1; j <= J; ++j) {
    const auto jj = static_cast<std::int64_t>(j);
    inst.coeffs[j - 1] =
        rng.normal() * std::exp(-0.5 * params.s_seq.log_value(jj)) * std::pow(static_cast<double>(j), -decay);
    const double log_ratio = rng.uniform(-std::log(d), std::log(d));
    inst.log_eigenvalues[j - 1] = 0.5 * (params.b_seq.log_value(jj) + log_ratio);
    inst.eigenvalues[j - 1] = std::exp(inst.log_eigenvalues[j - 1]);
  }
  const double norm = check_solution_membership(inst.coeffs, params.s_seq, r).value;
  if (norm > 0.0) {
    const double scale = std::sqrt(r * rng.uniform() / norm);
    for (double& c : inst.coeffs) c *= scale;
  }

  const NoiseLevels noise(rng.log_uniform(1e-6, 0.5), rng.log_uniform(1e-6, 0.5));
  const auto obs = simulate(inst, noise, seed, trial, J);
  bundle.est = estimate(obs, K, params.omega_seq);

  const double scale = rng.log_uniform(1e-6, 10.0);
  bundle.pen.resize(K);
  double running = scale * rng.uniform();
  for (std::size_t k = 1; k <= K; ++k) {
    if (k > 1 && rng.uniform() >= 0.2) running += scale * rng.uniform();
    bundle.pen[k - 1] = running;
  }
  return bundle;
}

}  // namespace

LemmaCheckReport key_lemma_trials(std::size_t trials, std::uint64_t seed, std::size_t max_K) {
  LemmaCheckReport report;
  report.tag = "key-lemma";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto bundle = random_bundle(seed, t, max_K);
    const auto one = check_key_lemma(bundle.est, bundle.instance, bundle.pen, bundle.instance.params.omega_seq);
    ++report.trials;
    if (!one.passed()) {
      ++report.violations;
      std::ostringstream note;
      note << "trial " << t << " violated with margin " << one.worst_margin;
      report.notes.push_back(note.str());
    }
    report.worst_margin = std::min(report.worst_margin, one.worst_margin);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo risk
// ---------------------------------------------------------------------------

std::string_view to_string(EstimationMode mode) { return mode == EstimationMode::oracle ? "oracle" : "adaptive"; }

EstimationMode parse_estimation_mode(std::string_view tag) {
  if (tag == "oracle") return EstimationMode::oracle;
  if (tag == "adaptive") return EstimationMode::adaptive;
  throw ConfigError("unknown estimation mode '" + std::string(tag) + "'");
}

OracleReport oracle_report(const ClassParams& params, const NoiseLevels& noise, std::size_t J,
                           std::optional<IllPosedness> family) {
  const auto& w = params.omega_seq;
  const auto& s = params.s_seq;
  const auto& b = params.b_seq;
  OracleReport out;
  out.nu = noise.nu;
  out.eps = noise.eps;
  const auto dim = oracle_k(noise.nu, w, s, b);
  out.rho_table = dim.rho_table;
  out.k_star = dim.k_star;
  out.psi_nu = dim.psi_nu;
  const auto ups = upsilon(noise.eps, w, s, b);
  out.upsilon_eps = ups.value;
  out.upsilon_argmax = ups.argmax;
  out.cap_limited = dim.cap_limited || ups.cap_limited;
  out.eta = eta_diagnostic(noise.nu, w, s, b);
  const auto minus = alpha_bounds(AlphaSequence::scaled_operator(b, 1.0 / (4.0 * params.d), AlphaTag::lower_operator),
                                  noise.nu, noise.eps, w, J);
  out.k_minus = minus.K;
  out.psi_diamond = psi_diamond(noise.nu, w, s, b, minus.K);
  if (family && params.p && params.b && params.s)
    out.theoretical_rate = theoretical_rate(*family, *params.p, *params.b, *params.s, noise.nu, noise.eps);
  return out;
}

namespace {

struct ReplicationOutcome {
  double risk = 0.0;
  std::size_t k = 0;
  std::size_t bound = 0;
  bool k_out_of_range = false;
  bool lemma_violation = false;
  double lemma_margin = std::numeric_limits<double>::infinity();
};

std::size_t median_index(std::vector<std::size_t> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace

RiskReport mc_risk(const McSettings& settings) {
  if (settings.replications < 1) throw ConfigError("replications must be >= 1");
  const auto& inst = settings.instance;
  const auto& params = inst.params;
  const auto& omega = params.omega_seq;
  const std::size_t J = std::min(truncation_length(settings.noise, settings.j_cap), inst.J());

  RiskReport report;
  report.nu = settings.noise.nu;
  report.eps = settings.noise.eps;
  report.mode = settings.mode;
  report.replications = settings.replications;
  report.J = J;
  report.penalty_constant = settings.penalty_constant;
  report.benchmark = oracle_report(params, settings.noise, J, settings.family);

  const auto omega_table = omega.table(inst.J());
  const auto tail = bias_table(inst, omega);
  const TruthTables truth{inst.coeffs, omega_table, tail};
  const std::size_t k_oracle = std::min(report.benchmark.k_star, J);

  std::vector<ReplicationOutcome> outcomes(settings.replications);
  detail::parallel_for(settings.replications, settings.workers, [&](std::size_t i) {
    ReplicationOutcome& out = outcomes[i];
    if (settings.mode == EstimationMode::oracle) {
      const auto obs = simulate(inst, settings.noise, settings.seed, i, k_oracle);
      const auto est = estimate(obs, k_oracle, omega);
      out.risk = risk_error_sq(est, truth.coeffs, truth.omega, truth.tail);
      out.k = k_oracle;
      return;
    }
    // The data-driven scans usually stop early; grow the simulated prefix
    // until the bound K_hat no longer depends on unseen coordinates.
    std::size_t n = std::min<std::size_t>(J, 64);
    for (;;) {
      const auto obs = simulate(inst, settings.noise, settings.seed, i, n);
      auto res = adaptive_estimate(obs, omega, settings.penalty_constant, std::nullopt, J);
      if (!res.bounds.hat.complete && n < J) {
        n = std::min(J, 2 * n);
        continue;
      }
      out.risk = risk_error_sq(res.selected, truth.coeffs, truth.omega, truth.tail);
      out.k = res.trace.k_hat;
      out.bound = res.bounds.hat.K;
      out.k_out_of_range = out.k < 1 || out.k > out.bound;
      const auto lemma = check_key_lemma(res.at_bound, truth, res.penalty.pen);
      out.lemma_violation = !lemma.passed();
      out.lemma_margin = lemma.worst_margin;
      return;
    }
  });

  CompensatedSum sum;
  for (const auto& o : outcomes) sum.add(o.risk);
  const auto R = static_cast<double>(settings.replications);
  report.risk_mean = sum.value() / R;
  CompensatedSum sq;
  for (const auto& o : outcomes) sq.add((o.risk - report.risk_mean) * (o.risk - report.risk_mean));
  report.risk_std_err = settings.replications > 1 ? std::sqrt(sq.value() / (R - 1.0) / R) : 0.0;

  std::vector<double> sorted;
  sorted.reserve(outcomes.size());
  for (const auto& o : outcomes) sorted.push_back(o.risk);
  if (settings.keep_risks) report.risks = sorted;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  report.risk_median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double half_width = 1.96 * std::sqrt(R) / 2.0;
  const auto lo = static_cast<std::ptrdiff_t>(std::floor(R / 2.0 - half_width));
  const auto hi = static_cast<std::ptrdiff_t>(std::ceil(R / 2.0 + half_width));
  report.median_lower = sorted[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(lo, 0, n - 1))];
  report.median_upper = sorted[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(hi, 0, n - 1))];

  std::vector<std::size_t> ks;
  ks.reserve(n);
  report.k_min = std::numeric_limits<std::size_t>::max();
  report.bound_min = std::numeric_limits<std::size_t>::max();
  for (const auto& o : outcomes) {
    ks.push_back(o.k);
    report.k_min = std::min(report.k_min, o.k);
    report.k_max = std::max(report.k_max, o.k);
    report.bound_min = std::min(report.bound_min, o.bound);
    report.bound_max = std::max(report.bound_max, o.bound);
    report.k_hat_out_of_range += o.k_out_of_range ? 1 : 0;
    report.key_lemma_violations += o.lemma_violation ? 1 : 0;
    report.key_lemma_worst_margin = std::min(report.key_lemma_worst_margin, o.lemma_margin);
  }
  report.k_median = median_index(std::move(ks));
  const auto& bm = report.benchmark;
  report.benchmark_ratio = report.risk_mean / (bm.psi_diamond + bm.upsilon_eps + report.nu + report.eps);
  return report;
}

double theorem22_bound(const ClassParams& params, const RiskReport& report) {
  return 4.0 * (6.0 * params.d + params.r) * std::max(report.benchmark.psi_nu, report.benchmark.upsilon_eps);
}

LemmaCheckReport check_theorem22(const ClassParams& params, std::span<const RiskReport> reports) {
  LemmaCheckReport out;
  out.tag = "thm22";
  for (const auto& rep : reports) {
    const double bound = theorem22_bound(params, rep);
    const double lower = rep.risk_mean - 3.0 * rep.risk_std_err;
    ++out.trials;
    if (lower > bound) ++out.violations;
    out.worst_margin = std::min(out.worst_margin, (bound - lower) / bound);
    if (rep.mode != EstimationMode::oracle) out.notes.push_back("bound stated for the oracle dimension only");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rate fit
// ---------------------------------------------------------------------------

RateFit rate_fit(std::span<const std::pair<double, double>> noise_and_risk, double expected_slope,
                 RateRegressor regressor) {
  if (noise_and_risk.size() < 3) throw DataError("rate fit needs at least 3 points");
  RateFit fit;
  fit.expected_slope = expected_slope;
  fit.regressor = regressor;
  for (const auto& [noise, risk] : noise_and_risk) {
    if (!(risk > 0.0)) throw DataError("rate fit needs positive risks");
    if (!(noise > 0.0 && noise < 1.0)) throw DataError("rate fit noise levels must lie in (0,1)");
    const double x = regressor == RateRegressor::log_noise ? std::log(noise) : std::log(std::abs(std::log(noise)));
    fit.points.emplace_back(x, std::log(risk));
  }
  const auto n = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw DataError("rate fit needs distinct noise levels");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  return fit;
}

// ---------------------------------------------------------------------------
// Ratio-deviation and delta-scale checks
// ---------------------------------------------------------------------------

LemmaA1Report check_lemma_A1(std::span<const std::size_t> js, const ProblemInstance& instance,
                             std::span<const double> eps_grid, std::size_t R, std::uint64_t seed) {
  if (R < 2) throw ConfigError("a1 check needs R >= 2");
  LemmaA1Report report;
  report.summary.tag = "a1";
  for (double eps : eps_grid) {
    const double sd = std::sqrt(eps);
    for (std::size_t j : js) {
      if (j < 1 || j > instance.J()) throw IndexDomainError("a1 index outside the instance");
      const double a = instance.eigenvalues[j - 1];
      std::array<CompensatedSum, 3> sum, sum_sq;
      for (std::size_t i = 0; i < R; ++i) {
        const double x = a + sd * standard_normal(seed, i, j, Stream::operator_noise);
        const bool kept = x * x >= eps;
        const double ratio = kept ? a / x : 0.0;
        const std::array<double, 3> v{kept ? (ratio - 1.0) * (ratio - 1.0) : 0.0, kept ? 0.0 : 1.0,
                                      kept ? ratio * ratio : 0.0};
        for (int t = 0; t < 3; ++t) {
          sum[t].add(v[t]);
          sum_sq[t].add(v[t] * v[t]);
        }
      }
      const auto n = static_cast<double>(R);
      const std::array<double, 3> bounds{std::min(1.0, 8.0 * eps / (a * a)), std::min(1.0, 4.0 * eps / (a * a)), 4.0};
      for (int t = 0; t < 3; ++t) {
        LemmaA1Row row;
        row.j = j;
        row.eps = eps;
        row.a = a;
        row.item = t + 1;
        row.estimate = sum[t].value() / n;
        const double var = std::max(0.0, (sum_sq[t].value() - n * row.estimate * row.estimate) / (n - 1.0));
        row.std_err = std::sqrt(var / n);
        row.bound = bounds[t];
        const double lower = row.estimate - 3.0 * row.std_err;
        ++report.summary.trials;
        if (lower > row.bound) ++report.summary.violations;
        report.summary.worst_margin = std::min(report.summary.worst_margin, (row.bound - lower) / row.bound);
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

LemmaA2Report check_lemma_A2(std::span<const double> nu_grid, const WeightSequence& omega, const WeightSequence& b,
                             double d) {
  LemmaA2Report report;
  report.summary.tag = "a2";
  report.summary.notes.push_back("delta evaluated on the mid-class eigenvalues a = sqrt(b)");
  const auto upper = AlphaSequence::scaled_operator(b, 4.0 * d, AlphaTag::upper_operator);
  const auto center = AlphaSequence::scaled_operator(b, 1.0, AlphaTag::operator_center);
  for (double nu : nu_grid) {
    if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("a2 grid values must lie in (0,1)");
    LemmaA2Row row;
    row.nu = nu;
    row.n_plus = n_bound(upper, nu, omega, floor_reciprocal(nu)).value;
    row.delta = delta(row.n_plus, center, omega).delta;
    row.scaled = nu * row.delta;
    row.bound = 32.0 * d * d;
    ++report.summary.trials;
    if (!(row.scaled <= row.bound)) ++report.summary.violations;
    report.summary.worst_margin = std::min(report.summary.worst_margin, (row.bound - row.scaled) / row.bound);
    report.rows.push_back(row);
  }
  return report;
}

EventScanReport event_probability_scan(const ProblemInstance& instance, std::span<const NoiseLevels> grid,
                                       std::size_t R, std::uint64_t seed, const PenaltyConstants& constants,
                                       unsigned workers) {
  if (R < 1) throw ConfigError("event scan needs R >= 1");
  const auto& params = instance.params;
  const OperatorClass op{params.b_seq, params.d};
  const auto& omega = params.omega_seq;

  std::vector<NoiseLevels> points(grid.begin(), grid.end());
  std::stable_sort(points.begin(), points.end(), [](const auto& x, const auto& y) { return x.eps > y.eps; });

  EventScanReport report;
  report.summary.tag = "events";
  for (const auto& noise : points) {
    const std::size_t J = std::min(truncation_length(noise), instance.J());
    const std::size_t prefix = event_prefix_length(noise.nu, noise.eps, omega, op, J);
    std::vector<EventFlags> flags(R);
    detail::parallel_for(R, workers, [&](std::size_t i) {
      std::size_t n = std::min(J, std::max<std::size_t>(prefix, 64));
      for (;;) {
        const auto obs = simulate(instance, noise, seed, i, n);
        const auto hat = alpha_bounds(AlphaSequence::observed(obs.X), noise.nu, noise.eps, omega, J);
        if (!hat.complete && n < J) {
          n = std::min(J, 2 * n);
          continue;
        }
        flags[i] = event_flags(obs, instance.log_eigenvalues, omega, op, constants, J);
        return;
      }
    });

    EventRow row;
    row.nu = noise.nu;
    row.eps = noise.eps;
    row.replications = R;
    std::size_t tilde_c = 0, eps_c = 0, mho_c = 0;
    for (const auto& f : flags) {
      tilde_c += f.omega_tilde ? 0 : 1;
      eps_c += f.omega_eps ? 0 : 1;
      mho_c += f.mho ? 0 : 1;
      if (f.omega_eps) {
        ++row.omega_eps_count;
        if (!f.sandwich) ++row.sandwich_failures_on_omega_eps;
      }
      if (f.omega_tilde) {
        ++row.omega_tilde_count;
        if (!f.bracket) ++row.bracket_failures_on_omega_tilde;
      }
    }
    const auto n = static_cast<double>(R);
    const auto freq = [n](std::size_t c) { return static_cast<double>(c) / n; };
    const auto se = [n](double f) { return std::sqrt(f * (1.0 - f) / n); };
    row.freq_tilde_c = freq(tilde_c);
    row.freq_eps_c = freq(eps_c);
    row.freq_mho_c = freq(mho_c);
    row.se_tilde_c = se(row.freq_tilde_c);
    row.se_eps_c = se(row.freq_eps_c);
    row.se_mho_c = se(row.freq_mho_c);
    row.implied_tilde = row.freq_tilde_c / (noise.eps * noise.eps);
    row.implied_eps = row.freq_eps_c / (noise.eps * noise.eps);
    report.rows.push_back(row);
  }

  // Non-increasing along decreasing eps, up to overlapping 3-SE bars.
  const auto rising = [](double f0, double s0, double f1, double s1) { return f1 - 3.0 * s1 > f0 + 3.0 * s0; };
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& p = report.rows[i - 1];
    const auto& c = report.rows[i];
    for (auto [name, bad] : {std::pair{"tilde-omega", rising(p.freq_tilde_c, p.se_tilde_c, c.freq_tilde_c, c.se_tilde_c)},
                             std::pair{"omega-eps", rising(p.freq_eps_c, p.se_eps_c, c.freq_eps_c, c.se_eps_c)},
                             std::pair{"mho", rising(p.freq_mho_c, p.se_mho_c, c.freq_mho_c, c.se_mho_c)}}) {
      ++report.summary.trials;
      if (bad) {
        ++report.summary.violations;
        std::ostringstream note;
        note << name << " complement frequency rises from eps=" << p.eps << " to eps=" << c.eps;
        report.summary.notes.push_back(note.str());
      }
    }
  }
  for (const auto& row : report.rows) {
    if (row.sandwich_failures_on_omega_eps > 0 || row.bracket_failures_on_omega_tilde > 0) {
      std::ostringstream note;
      note << "eps=" << row.eps << ": sandwich failed on " << row.sandwich_failures_on_omega_eps
           << " realizations inside Omega_eps, bracket failed on " << row.bracket_failures_on_omega_tilde
           << " inside tilde Omega";
      report.summary.notes.push_back(note.str());
    }
  }
  return report;
}

}  // namespace seqinv
