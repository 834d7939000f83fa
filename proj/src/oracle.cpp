#include "seqinv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqinv/adaptive.hpp"
#include "seqinv/errors.hpp"

namespace seqinv {

IllPosedness parse_ill_posedness(std::string_view tag) {
  if (tag == "mild") return IllPosedness::mild;
  if (tag == "severe") return IllPosedness::severe;
  throw ConfigError("unknown ill-posedness family '" + std::string(tag) + "'");
}

std::string_view to_string(IllPosedness family) { return family == IllPosedness::mild ? "mild" : "severe"; }

namespace {

// Values within this relative distance count as ties, which go to the smaller index.
constexpr double kTieTolerance = 1e-12;

// nu * omega_j / b_j, evaluated in log space.
double variance_term(std::size_t j, double log_nu, const WeightSequence& omega, const WeightSequence& b) {
  const auto jj = static_cast<std::int64_t>(j);
  return std::exp(log_nu + omega.log_value(jj) - b.log_value(jj));
}

double bias_term(std::size_t k, const WeightSequence& omega, const WeightSequence& s) {
  const auto kk = static_cast<std::int64_t>(k);
  return std::exp(omega.log_value(kk) - s.log_value(kk));
}

}  // namespace

double rho(std::size_t k, double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b) {
  if (k < 1) throw IndexDomainError("rho needs k >= 1");
  const double log_nu = std::log(nu);
  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) sum += variance_term(j, log_nu, omega, b);
  return std::max(bias_term(k, omega, s), sum);
}

OracleDimension oracle_k(double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b,
                         std::size_t k_max) {
  if (k_max < 1) throw IndexDomainError("oracle scan needs k_max >= 1");
  const double log_nu = std::log(nu);
  OracleDimension out;
  out.psi_nu = std::numeric_limits<double>::infinity();
  out.cap_limited = true;
  double sum = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    sum += variance_term(k, log_nu, omega, b);
    const double value = std::max(bias_term(k, omega, s), sum);
    out.rho_table.push_back(value);
    if (value < out.psi_nu * (1.0 - kTieTolerance)) {
      out.psi_nu = value;
      out.k_star = k;
    }
    // rho_j >= sum_j >= sum_k > psi for all j > k.
    if (sum > out.psi_nu) {
      out.cap_limited = false;
      break;
    }
  }
  return out;
}

UpsilonResult upsilon(double eps, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b,
                      std::size_t k_max) {
  const double log_eps = std::log(eps);
  UpsilonResult out;
  out.value = -1.0;
  out.cap_limited = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto kk = static_cast<std::int64_t>(k);
    const double log_ratio = omega.log_value(kk) - s.log_value(kk);
    // Every later term is at most omega_k / s_k.
    if (k > 1 && std::exp(log_ratio) <= out.value) {
      out.cap_limited = false;
      break;
    }
    const double term = std::exp(log_ratio + std::min(0.0, log_eps - b.log_value(kk)));
    if (term > out.value * (1.0 + kTieTolerance)) {
      out.value = term;
      out.argmax = k;
    }
  }
  return out;
}

double eta_diagnostic(double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b) {
  const auto oracle = oracle_k(nu, omega, s, b);
  const double log_nu = std::log(nu);
  double sum = 0.0;
  for (std::size_t j = 1; j <= oracle.k_star; ++j) sum += variance_term(j, log_nu, omega, b);
  return std::min(bias_term(oracle.k_star, omega, s), sum) / oracle.psi_nu;
}

double psi_diamond(double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b,
                   std::size_t k_minus) {
  if (k_minus < 1) throw IndexDomainError("psi_diamond needs K- >= 1");
  const auto table = penalty_table(AlphaSequence::scaled_operator(b, 1.0, AlphaTag::operator_center), omega, nu,
                                   k_minus, 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= k_minus; ++k) best = std::min(best, std::max(bias_term(k, omega, s), table.pen[k - 1]));
  return best;
}

double theoretical_nu_exponent(IllPosedness family, double p, double b, double s) {
  if (family == IllPosedness::mild) return 2.0 * (p - s) / (2.0 * p + 2.0 * b + 1.0);
  if (!(b > 0.0)) throw ConfigError("severe rate needs b > 0");
  return -(p - s) / b;
}

double theoretical_rate(IllPosedness family, double p, double b, double s, double nu, double eps) {
  if (!(b > 0.0)) throw ConfigError("theoretical rate needs b > 0");
  if (family == IllPosedness::mild) {
    const double nu_part = std::pow(nu, theoretical_nu_exponent(family, p, b, s));
    const double eps_part = std::pow(eps, std::min(p - s, b) / b);
    return std::max(nu_part, eps_part);
  }
  const double e = -(p - s) / b;
  return std::max(std::pow(std::abs(std::log(nu)), e), std::pow(std::abs(std::log(eps)), e));
}

}  // namespace seqinv
