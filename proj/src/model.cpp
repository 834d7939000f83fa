#include "seqinv/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqinv/errors.hpp"
#include "seqinv/numeric.hpp"
#include "seqinv/rng.hpp"

namespace seqinv {

ClassParams ClassParams::mild(double p, double b, double s, double r, double d) {
  ClassParams params;
  params.r = r;
  params.d = d;
  params.s_seq = WeightSequence::sobolev(p);
  params.b_seq = WeightSequence::poly_decay(b);
  params.omega_seq = WeightSequence::norm(s);
  params.p = p;
  params.b = b;
  params.s = s;
  params.validate();
  return params;
}

ClassParams ClassParams::severe(double p, double b, double s, double r, double d) {
  ClassParams params = mild(p, b, s, r, d);
  params.b_seq = WeightSequence::exp_decay(b);
  return params;
}

void ClassParams::validate() const {
  if (!(r > 0.0)) throw ConfigError("class radius r must be positive");
  if (!(d >= 1.0)) throw ConfigError("operator class width d must be >= 1");
  if (p && s && !(*p >= *s)) throw ConfigError("need p >= s");
  if (s && !(*s >= 0.0)) throw ConfigError("need s >= 0");
  if (b && !(*b >= 0.0)) throw ConfigError("need b >= 0");
}

SolutionKind parse_solution_kind(std::string_view tag) {
  if (tag == "boundary-single") return SolutionKind::boundary_single;
  if (tag == "boundary-spread") return SolutionKind::boundary_spread;
  throw ConfigError("unknown instance kind '" + std::string(tag) + "'");
}

OperatorKind parse_operator_kind(std::string_view tag) {
  if (tag == "mid-class") return OperatorKind::mid_class;
  if (tag == "edge") return OperatorKind::edge;
  throw ConfigError("unknown operator kind '" + std::string(tag) + "'");
}

std::string_view to_string(SolutionKind kind) {
  return kind == SolutionKind::boundary_single ? "boundary-single" : "boundary-spread";
}

std::string_view to_string(OperatorKind kind) { return kind == OperatorKind::mid_class ? "mid-class" : "edge"; }

ProblemInstance make_instance(SolutionKind solution, OperatorKind op, const ClassParams& params, std::size_t J) {
  if (J < 1) throw IndexDomainError("instance length J must be >= 1");
  params.validate();
  ProblemInstance inst;
  inst.params = params;
  inst.coeffs.assign(J, 0.0);
  inst.eigenvalues.resize(J);
  inst.log_eigenvalues.resize(J);

  switch (solution) {
    case SolutionKind::boundary_single:
      inst.coeffs[0] = std::sqrt(params.r / params.s_seq(1));
      break;
    case SolutionKind::boundary_spread: {
      // [f]_j = c s_j^{-1/2} / j, so s_j [f]_j^2 = c^2 / j^2.
      CompensatedSum harmonic;
      for (std::size_t j = 1; j <= J; ++j) harmonic.add(1.0 / (static_cast<double>(j) * static_cast<double>(j)));
      const double c = std::sqrt(params.r / harmonic.value());
      for (std::size_t j = 1; j <= J; ++j) {
        const auto jj = static_cast<std::int64_t>(j);
        inst.coeffs[j - 1] = c * std::exp(-0.5 * params.s_seq.log_value(jj)) / static_cast<double>(j);
      }
      break;
    }
  }

  const double log_scale = op == OperatorKind::edge ? 0.5 * std::log(params.d) : 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double la = 0.5 * params.b_seq.log_value(static_cast<std::int64_t>(j)) + log_scale;
    inst.log_eigenvalues[j - 1] = la;
    inst.eigenvalues[j - 1] = std::exp(la);
  }
  return inst;
}

MembershipResult check_solution_membership(std::span<const double> coeffs, const WeightSequence& s_seq, double r) {
  CompensatedSum norm;
  for (std::size_t j = 1; j <= coeffs.size(); ++j) {
    const double c = coeffs[j - 1];
    if (c != 0.0) norm.add(s_seq(static_cast<std::int64_t>(j)) * c * c);
  }
  MembershipResult out;
  out.value = norm.value();
  out.pass = out.value <= r * (1.0 + 1e-12);
  return out;
}

MembershipResult check_operator_membership(std::span<const double> log_eigenvalues, const WeightSequence& b_seq,
                                           double d) {
  const double log_d = std::log(d);
  const double tol = 1e-12 * std::max(1.0, log_d);
  MembershipResult out;
  out.pass = true;
  double worst = 0.0;
  for (std::size_t j = 1; j <= log_eigenvalues.size(); ++j) {
    const double log_ratio = 2.0 * log_eigenvalues[j - 1] - b_seq.log_value(static_cast<std::int64_t>(j));
    if (std::abs(log_ratio) > log_d + tol) out.pass = false;
    if (!out.worst_index || std::abs(log_ratio) > std::abs(worst)) {
      worst = log_ratio;
      out.worst_index = j;
    }
  }
  out.value = std::exp(worst);
  return out;
}

MembershipResult check_operator_membership(const ProblemInstance& instance) {
  return check_operator_membership(instance.log_eigenvalues, instance.params.b_seq, instance.params.d);
}

NoiseLevels::NoiseLevels(double nu_, double eps_) : nu(nu_), eps(eps_) {
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("noise level nu must lie in (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("noise level eps must lie in (0,1)");
}

std::size_t truncation_length(const NoiseLevels& noise, std::size_t j_cap) {
  const auto ceil_recip = [](double x) {
    const std::size_t f = floor_reciprocal(x);
    return static_cast<double>(f) * x >= 1.0 ? f : f + 1;
  };
  return std::max<std::size_t>(1, std::min({ceil_recip(noise.nu), ceil_recip(noise.eps), j_cap}));
}

ObservationSet simulate(const ProblemInstance& instance, const NoiseLevels& noise, std::uint64_t seed,
                        std::uint64_t replication, std::optional<std::size_t> length) {
  const std::size_t n = length.value_or(std::min(truncation_length(noise), instance.J()));
  if (n < 1 || n > instance.J())
    throw IndexDomainError("simulation length " + std::to_string(n) + " outside 1.." + std::to_string(instance.J()));
  ObservationSet obs;
  obs.noise = noise;
  obs.J = n;
  obs.seed = seed;
  obs.replication = replication;
  obs.Y.resize(n);
  obs.X.resize(n);
  const double sd_y = std::sqrt(noise.nu);
  const double sd_x = std::sqrt(noise.eps);
  for (std::size_t j = 1; j <= n; ++j) {
    const double a = instance.eigenvalues[j - 1];
    obs.Y[j - 1] = a * instance.coeffs[j - 1] + sd_y * standard_normal(seed, replication, j, Stream::image_noise);
    obs.X[j - 1] = a + sd_x * standard_normal(seed, replication, j, Stream::operator_noise);
  }
  return obs;
}

}  // namespace seqinv
