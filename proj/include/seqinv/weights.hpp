#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace seqinv {

enum class WeightFamily { sobolev, poly_decay, exp_decay, norm, constant, custom_table };

std::string_view to_string(WeightFamily family);

/**
 * Strictly positive weight sequence indexed from 1.
 *
 * Parametric families are evaluated lazily; the log evaluator is exact for
 * every family and is the one to use when a value may underflow, e.g.
 * exp(-j^{2b}) for j beyond ~27 at b = 1.
 *
 *   sobolev(p)     j^{2p}
 *   poly_decay(b)  j^{-2b}
 *   exp_decay(b)   exp(-j^{2b})
 *   norm(s)        j^{2s}
 *   constant(c)    c
 *   custom_table   finite table; indices past the end are an error
 */
class WeightSequence {
 public:
  WeightSequence() = default;  // constant 1

  static WeightSequence sobolev(double p);
  static WeightSequence poly_decay(double b);
  static WeightSequence exp_decay(double b);
  static WeightSequence norm(double s);
  static WeightSequence constant(double value = 1.0);
  static WeightSequence custom_table(std::vector<double> values);

  /// Parses `{"family":"sobolev","p":1.0}` and the analogous forms
  /// (`poly-decay`/`exp-decay` take `b`, `norm` takes `s`, `constant` an
  /// optional `value`, `custom-table` a `values` array). Throws ConfigError.
  static WeightSequence from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  double operator()(std::int64_t j) const;
  double log_value(std::int64_t j) const;

  /// Values 1..n, linear scale.
  std::vector<double> table(std::size_t n) const;
  std::vector<double> log_table(std::size_t n) const;

  WeightFamily family() const { return family_; }
  double parameter() const { return parameter_; }
  /// Number of defined entries for custom tables, nullopt otherwise.
  std::optional<std::size_t> size() const;
  std::string describe() const;

 private:
  WeightSequence(WeightFamily family, double parameter);
  void check_index(std::int64_t j) const;

  WeightFamily family_ = WeightFamily::constant;
  double parameter_ = 1.0;
  std::shared_ptr<const std::vector<double>> table_;
};

double eval(const WeightSequence& seq, std::int64_t j);

struct AdmissibilityReport {
  // First index at which each condition fails; empty means the condition holds on 1..J.
  std::optional<std::string> normalization_violation;  // names the offending sequence
  std::optional<std::int64_t> ratio_violation;         // omega/s increases at this index
  std::optional<std::int64_t> decay_violation;         // b increases at this index

  bool pass() const { return !normalization_violation && !ratio_violation && !decay_violation; }
  std::string summary() const;
};

/// Checks omega_1 = s_1 = b_1 = 1, omega/s non-increasing and b non-increasing on 1..J.
AdmissibilityReport check_admissible(const WeightSequence& omega, const WeightSequence& s,
                                     const WeightSequence& b, std::int64_t J);

}  // namespace seqinv
