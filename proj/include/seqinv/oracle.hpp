#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "seqinv/weights.hpp"

namespace seqinv {

inline constexpr std::size_t kDefaultScanCap = 1000000;

enum class IllPosedness { mild, severe };
IllPosedness parse_ill_posedness(std::string_view tag);
std::string_view to_string(IllPosedness family);

/// rho_{k,nu} = max(omega_k / s_k, sum_{j<=k} nu omega_j / b_j).
double rho(std::size_t k, double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b);

struct OracleDimension {
  std::size_t k_star = 1;
  double psi_nu = 0.0;
  bool cap_limited = false;
  std::vector<double> rho_table;  // rho_1 .. rho_{last scanned}
};

/// Smallest minimizer of rho over 1..k_max (relative ties below 1e-12 go to
/// the smaller index). Stops once the variance sum alone
/// exceeds the running minimum; flags cap_limited if the cap is hit first.
OracleDimension oracle_k(double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b,
                         std::size_t k_max = kDefaultScanCap);

struct UpsilonResult {
  double value = 0.0;
  std::size_t argmax = 1;
  bool cap_limited = false;
};

/// max_k (omega_k / s_k) min(1, eps / b_k), smallest attaining index.
UpsilonResult upsilon(double eps, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b,
                      std::size_t k_max = kDefaultScanCap);

/// psi_nu^{-1} min(omega_{k*}/s_{k*}, sum_{l<=k*} nu omega_l / b_l); lies in (0, 1].
double eta_diagnostic(double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b);

/// min_{1<=k<=k_minus} max(omega_k / s_k, delta_k nu) with delta computed on alpha = sqrt(b).
double psi_diamond(double nu, const WeightSequence& omega, const WeightSequence& s, const WeightSequence& b,
                   std::size_t k_minus);

/// Closed-form rate of the mild and severe families.
///   mild:   max(nu^{2(p-s)/(2p+2b+1)}, eps^{min(p-s,b)/b})
///   severe: max(|log nu|^{-(p-s)/b}, |log eps|^{-(p-s)/b})
double theoretical_rate(IllPosedness family, double p, double b, double s, double nu, double eps);

/// Exponent of nu in the mild rate, or of |log nu| in the severe one.
double theoretical_nu_exponent(IllPosedness family, double p, double b, double s);

struct OracleReport {
  double nu = 0.0;
  double eps = 0.0;
  std::vector<double> rho_table;
  std::size_t k_star = 1;
  double psi_nu = 0.0;
  double upsilon_eps = 0.0;
  std::size_t upsilon_argmax = 1;
  double eta = 0.0;
  double psi_diamond = 0.0;
  std::size_t k_minus = 1;
  std::optional<double> theoretical_rate;
  bool cap_limited = false;
};

}  // namespace seqinv
