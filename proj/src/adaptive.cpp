#include "seqinv/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqinv/errors.hpp"
#include "seqinv/numeric.hpp"

namespace seqinv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_delta_from(std::size_t k, double log_Delta) {
  const double log_k2 = std::log(static_cast<double>(k) + 2.0);
  return std::log(static_cast<double>(k)) + log_Delta + std::log(std::max(log_Delta, log_k2)) - std::log(log_k2);
}

}  // namespace

double v_eps(double eps) { return 1.0 / (8.0 * std::log(std::log(1.0 / eps + 20.0))); }

std::string_view to_string(AlphaTag tag) {
  switch (tag) {
    case AlphaTag::observed_x: return "X";
    case AlphaTag::eigenvalues: return "eigenvalues-a";
    case AlphaTag::upper_operator: return "sqrt(4d*b)";
    case AlphaTag::lower_operator: return "sqrt(b/(4d))";
    case AlphaTag::operator_center: return "sqrt(b)";
  }
  return "unknown";
}

AlphaSequence AlphaSequence::observed(std::span<const double> x) {
  AlphaSequence seq;
  seq.tag_ = AlphaTag::observed_x;
  seq.size_ = x.size();
  seq.log_sq_ = [x](std::size_t j) {
    const double v = x[j - 1];
    return v == 0.0 ? -kInf : 2.0 * std::log(std::abs(v));
  };
  return seq;
}

AlphaSequence AlphaSequence::eigenvalues(std::span<const double> log_a) {
  AlphaSequence seq;
  seq.tag_ = AlphaTag::eigenvalues;
  seq.size_ = log_a.size();
  seq.log_sq_ = [log_a](std::size_t j) { return 2.0 * log_a[j - 1]; };
  return seq;
}

AlphaSequence AlphaSequence::scaled_operator(const WeightSequence& b, double factor, AlphaTag tag) {
  AlphaSequence seq;
  seq.tag_ = tag;
  seq.size_ = b.size();
  const double log_factor = std::log(factor);
  seq.log_sq_ = [b, log_factor](std::size_t j) { return log_factor + b.log_value(static_cast<std::int64_t>(j)); };
  return seq;
}

double AlphaSequence::log_sq(std::size_t j) const {
  if (j < 1 || (size_ && j > *size_))
    throw IndexDomainError("alpha index " + std::to_string(j) + " outside the stored sequence");
  return log_sq_(j);
}

DeltaValue delta(std::size_t k, const AlphaSequence& alpha, const WeightSequence& omega) {
  if (k < 1) throw IndexDomainError("delta needs k >= 1");
  double log_Delta = -kInf;
  for (std::size_t j = 1; j <= k; ++j) {
    const double la = alpha.log_sq(j);
    if (la == -kInf) throw DataError("alpha_" + std::to_string(j) + " is zero");
    log_Delta = std::max(log_Delta, omega.log_value(static_cast<std::int64_t>(j)) - la);
  }
  DeltaValue out;
  out.log_Delta = log_Delta;
  out.log_delta = log_delta_from(k, log_Delta);
  out.Delta = std::exp(log_Delta);
  out.delta = std::exp(out.log_delta);
  return out;
}

PenaltyTable penalty_table(const AlphaSequence& alpha, const WeightSequence& omega, double nu, std::size_t K,
                           double constant) {
  PenaltyTable table;
  table.alpha_tag = alpha.tag();
  table.penalty_constant = constant;
  table.Delta.resize(K);
  table.delta.resize(K);
  table.pen.resize(K);
  double log_Delta = -kInf;
  for (std::size_t k = 1; k <= K; ++k) {
    const double la = alpha.log_sq(k);
    log_Delta = la == -kInf ? kInf : std::max(log_Delta, omega.log_value(static_cast<std::int64_t>(k)) - la);
    const double d = log_Delta == kInf ? kInf : std::exp(log_delta_from(k, log_Delta));
    table.Delta[k - 1] = std::exp(log_Delta);
    table.delta[k - 1] = d;
    table.pen[k - 1] = constant * d * nu;
  }
  return table;
}

double pen_hat(const ObservationSet& obs, std::size_t k, const WeightSequence& omega, double constant) {
  if (k < 1 || k > obs.X.size()) throw IndexDomainError("penalty index outside the observation range");
  const auto table = penalty_table(AlphaSequence::observed(obs.X), omega, obs.noise.nu, k, constant);
  return table.pen.back();
}

std::size_t n_circ(double nu, const WeightSequence& omega, std::size_t J) {
  const std::size_t upper = std::min(floor_reciprocal(nu), J);
  const double log_limit = -std::log(nu);
  double log_plus = -kInf;
  std::size_t best = 1;
  for (std::size_t N = 1; N <= upper; ++N) {
    log_plus = std::max(log_plus, omega.log_value(static_cast<std::int64_t>(N)));
    if (log_plus > log_limit) break;
    best = N;
  }
  return best;
}

BoundScan n_bound(const AlphaSequence& alpha, double nu, const WeightSequence& omega, std::size_t J) {
  const auto available = alpha.size().value_or(std::numeric_limits<std::size_t>::max());
  const std::size_t nc = n_circ(nu, omega, J);
  const double log_limit = std::log(nu * std::abs(std::log(nu)));
  double log_plus = omega.log_value(1);
  for (std::size_t j = 2; j <= nc; ++j) {
    if (j > available) return {j - 1, false};
    log_plus = std::max(log_plus, omega.log_value(static_cast<std::int64_t>(j)));
    if (alpha.log_sq(j) - std::log(static_cast<double>(j)) - log_plus <= log_limit) return {j - 1, true};
  }
  return {nc, true};
}

BoundScan m_bound(const AlphaSequence& alpha, double eps, std::size_t J) {
  const auto available = alpha.size().value_or(std::numeric_limits<std::size_t>::max());
  const std::size_t m_end = std::min(floor_reciprocal(eps), J);
  const double log_limit = (1.0 - v_eps(eps)) * std::log(eps);
  for (std::size_t j = 2; j <= m_end; ++j) {
    if (j > available) return {j - 1, false};
    if (alpha.log_sq(j) <= log_limit) return {j - 1, true};
  }
  return {std::max<std::size_t>(m_end, 1), true};
}

AlphaBounds alpha_bounds(const AlphaSequence& alpha, double nu, double eps, const WeightSequence& omega,
                         std::size_t J) {
  const auto n = n_bound(alpha, nu, omega, J);
  const auto m = m_bound(alpha, eps, J);
  AlphaBounds out;
  out.N = n.value;
  out.M = m.value;
  out.K = std::min(out.N, out.M);
  // A partial scan only bounds its value from below, so K is still exact when
  // the completed scan is the smaller one.
  out.complete = (n.complete && m.complete) || (n.complete && n.value <= m.value) ||
                 (m.complete && m.value <= n.value);
  return out;
}

namespace {

std::vector<double> omega_plus_table(const WeightSequence& omega, std::size_t n) {
  std::vector<double> out(n);
  double running = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    running = std::max(running, omega(static_cast<std::int64_t>(j)));
    out[j - 1] = running;
  }
  return out;
}

}  // namespace

DimensionBounds dimension_bounds(const ObservationSet& obs, const WeightSequence& omega,
                                 const std::optional<OperatorClass>& op, std::optional<std::size_t> scan_limit) {
  const double nu = obs.noise.nu;
  const double eps = obs.noise.eps;
  const std::size_t J = scan_limit.value_or(obs.J);
  DimensionBounds out;
  out.n_circ = n_circ(nu, omega, J);
  out.v_eps = v_eps(eps);
  out.hat = alpha_bounds(AlphaSequence::observed(obs.X), nu, eps, omega, J);
  std::size_t longest = out.hat.K;
  if (op) {
    out.plus = alpha_bounds(AlphaSequence::scaled_operator(op->b, 4.0 * op->d, AlphaTag::upper_operator), nu, eps,
                            omega, J);
    out.minus = alpha_bounds(AlphaSequence::scaled_operator(op->b, 1.0 / (4.0 * op->d), AlphaTag::lower_operator),
                             nu, eps, omega, J);
    longest = std::max(longest, out.plus->K);
  }
  out.omega_plus = omega_plus_table(omega, longest);
  return out;
}

SelectionTrace contrast_and_select(std::span<const double> prefix_norms, std::span<const double> pen) {
  const std::size_t K = prefix_norms.size();
  if (K < 1) throw IndexDomainError("contrast needs at least one candidate dimension");
  if (pen.size() < K) throw IndexDomainError("penalty table shorter than the candidate range");
  SelectionTrace trace;
  trace.contrast.resize(K);
  trace.penalized.resize(K);
  // The sweep tracks the maximizer of S_j - pen_j over j >= k; the contrast is
  // then evaluated as (S_j - S_k) - pen_j so that the j = k case is exactly
  // -pen_k and structural ties at zero survive rounding.
  double running = -kInf;
  std::size_t arg = K;
  for (std::size_t k = K; k >= 1; --k) {
    const double here = prefix_norms[k - 1] - pen[k - 1];
    if (here >= running) {
      running = here;
      arg = k;
    }
    trace.contrast[k - 1] = arg == k ? -pen[k - 1] : (prefix_norms[arg - 1] - prefix_norms[k - 1]) - pen[arg - 1];
    trace.penalized[k - 1] = trace.contrast[k - 1] + pen[k - 1];
  }
  trace.k_hat = 1;
  for (std::size_t k = 2; k <= K; ++k)
    if (trace.penalized[k - 1] < trace.penalized[trace.k_hat - 1]) trace.k_hat = k;
  return trace;
}

AdaptiveResult adaptive_estimate(const ObservationSet& obs, const WeightSequence& omega, double penalty_constant,
                                 const std::optional<OperatorClass>& op, std::optional<std::size_t> scan_limit) {
  AdaptiveResult result;
  result.bounds = dimension_bounds(obs, omega, op, scan_limit);
  const std::size_t K = result.bounds.hat.K;
  result.penalty = penalty_table(AlphaSequence::observed(obs.X), omega, obs.noise.nu, K, penalty_constant);
  result.at_bound = estimate(obs, K, omega);
  result.trace = contrast_and_select(result.at_bound.prefix_norms, result.penalty.pen);
  result.selected = result.at_bound.truncated(result.trace.k_hat);
  return result;
}

std::size_t event_prefix_length(double nu, double eps, const WeightSequence& omega, const OperatorClass& op,
                                std::size_t J) {
  const auto plus = alpha_bounds(AlphaSequence::scaled_operator(op.b, 4.0 * op.d, AlphaTag::upper_operator), nu,
                                 eps, omega, J);
  return std::min(J, std::max(plus.K, plus.M + 1));
}

EventFlags event_flags(const ObservationSet& obs, std::span<const double> log_a, const WeightSequence& omega,
                       const OperatorClass& op, const PenaltyConstants& constants,
                       std::optional<std::size_t> scan_limit) {
  const double nu = obs.noise.nu;
  const double eps = obs.noise.eps;
  const std::size_t J = scan_limit.value_or(obs.J);
  const auto plus = alpha_bounds(AlphaSequence::scaled_operator(op.b, 4.0 * op.d, AlphaTag::upper_operator), nu,
                                 eps, omega, J);
  const auto minus = alpha_bounds(AlphaSequence::scaled_operator(op.b, 1.0 / (4.0 * op.d), AlphaTag::lower_operator),
                                  nu, eps, omega, J);
  const auto hat = alpha_bounds(AlphaSequence::observed(obs.X), nu, eps, omega, J);
  if (!hat.complete) throw IndexDomainError("observation prefix too short for the data-driven bound scan");

  const std::size_t tilde_end = std::min(plus.M + 1, J);
  const std::size_t needed = std::max({plus.K, tilde_end});
  if (needed > obs.X.size() || needed > log_a.size())
    throw IndexDomainError("event flags need " + std::to_string(needed) + " coordinates");

  EventFlags flags;
  flags.m_plus = plus.M;
  flags.k_plus = plus.K;
  flags.k_minus = minus.K;
  flags.k_hat = hat.K;

  flags.omega_eps = true;
  for (std::size_t j = 1; j <= std::min(plus.M, J); ++j) {
    const double x = obs.X[j - 1];
    const double a_over_x = std::exp(log_a[j - 1]) / x;
    if (!(x * x >= eps) || !(std::abs(a_over_x - 1.0) <= 0.5)) {
      flags.omega_eps = false;
      break;
    }
  }
  flags.omega_tilde = true;
  for (std::size_t j = 1; j <= tilde_end; ++j) {
    const double x_over_a = obs.X[j - 1] * std::exp(-log_a[j - 1]);
    if (!(std::abs(x_over_a - 1.0) <= 1.0 / 3.0)) {
      flags.omega_tilde = false;
      break;
    }
  }

  const auto pen_a = penalty_table(AlphaSequence::eigenvalues(log_a), omega, nu, plus.K, constants.deterministic);
  const auto pen_x = penalty_table(AlphaSequence::observed(obs.X), omega, nu, plus.K, constants.data_driven);
  flags.sandwich = true;
  for (std::size_t k = 1; k <= plus.K; ++k) {
    if (!(pen_a.pen[k - 1] <= pen_x.pen[k - 1] && pen_x.pen[k - 1] <= 30.0 * pen_a.pen[k - 1])) {
      flags.sandwich = false;
      break;
    }
  }
  flags.bracket = minus.K <= hat.K && hat.K <= plus.K;
  flags.mho = flags.sandwich && flags.bracket;
  return flags;
}

ConditionLReport check_condition_L(const WeightSequence& b, double d, std::span<const double> eps_grid) {
  ConditionLReport report;
  report.L = -kInf;
  for (double eps : eps_grid) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("condition-L grid values must lie in (0,1)");
    // M+ without any truncation cap: the scan runs over 2..floor(1/eps).
    const std::size_t m_end = floor_reciprocal(eps);
    const double log_limit = (1.0 - v_eps(eps)) * std::log(eps);
    const double log_4d = std::log(4.0 * d);
    std::size_t m_plus = m_end;
    for (std::size_t j = 2; j <= m_end; ++j) {
      if (log_4d + b.log_value(static_cast<std::int64_t>(j)) <= log_limit) {
        m_plus = j - 1;
        break;
      }
    }
    const double log_b = b.log_value(static_cast<std::int64_t>(m_plus + 1));
    const double log_value = -7.0 * std::log(eps) - 0.5 * log_b - std::exp(log_b) / (72.0 * eps * d);
    report.eps.push_back(eps);
    report.m_plus.push_back(m_plus);
    report.log_values.push_back(log_value);
    report.L = std::max(report.L, log_value);
  }
  report.L = std::exp(report.L);
  const auto n = report.log_values.size();
  report.growing = n >= 2 && report.log_values[n - 1] > report.log_values[n - 2];
  return report;
}

}  // namespace seqinv
