#include "seqinv/weights.hpp"

#include <cmath>
#include <sstream>

#include "seqinv/errors.hpp"

namespace seqinv {

std::string_view to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::sobolev: return "sobolev";
    case WeightFamily::poly_decay: return "poly-decay";
    case WeightFamily::exp_decay: return "exp-decay";
    case WeightFamily::norm: return "norm";
    case WeightFamily::constant: return "constant";
    case WeightFamily::custom_table: return "custom-table";
  }
  return "unknown";
}

WeightSequence::WeightSequence(WeightFamily family, double parameter)
    : family_(family), parameter_(parameter) {
  if (!std::isfinite(parameter))
    throw ConfigError("weight parameter must be finite");
  if (family == WeightFamily::constant && !(parameter > 0.0))
    throw ConfigError("constant weight must be positive");
}

WeightSequence WeightSequence::sobolev(double p) { return {WeightFamily::sobolev, p}; }
WeightSequence WeightSequence::poly_decay(double b) { return {WeightFamily::poly_decay, b}; }
WeightSequence WeightSequence::exp_decay(double b) { return {WeightFamily::exp_decay, b}; }
WeightSequence WeightSequence::norm(double s) { return {WeightFamily::norm, s}; }
WeightSequence WeightSequence::constant(double value) { return {WeightFamily::constant, value}; }

WeightSequence WeightSequence::custom_table(std::vector<double> values) {
  if (values.empty()) throw ConfigError("custom weight table is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << "custom weight table entry " << i + 1 << " is not strictly positive and finite";
      throw ConfigError(msg.str());
    }
  }
  WeightSequence seq(WeightFamily::custom_table, 0.0);
  seq.table_ = std::make_shared<const std::vector<double>>(std::move(values));
  return seq;
}

namespace {

double require_number(const nlohmann::json& spec, const char* key) {
  auto it = spec.find(key);
  if (it == spec.end() || !it->is_number())
    throw ConfigError(std::string("weight spec: missing numeric field '") + key + "'");
  return it->get<double>();
}

}  // namespace

WeightSequence WeightSequence::from_json(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("weight spec must be an object");
  auto fam = spec.find("family");
  if (fam == spec.end() || !fam->is_string())
    throw ConfigError("weight spec: missing string field 'family'");
  const auto name = fam->get<std::string>();
  if (name == "sobolev") return sobolev(require_number(spec, "p"));
  if (name == "poly-decay") return poly_decay(require_number(spec, "b"));
  if (name == "exp-decay") return exp_decay(require_number(spec, "b"));
  if (name == "norm") return norm(require_number(spec, "s"));
  if (name == "constant")
    return constant(spec.contains("value") ? require_number(spec, "value") : 1.0);
  if (name == "custom-table") {
    auto vals = spec.find("values");
    if (vals == spec.end() || !vals->is_array())
      throw ConfigError("weight spec: custom-table needs a 'values' array");
    std::vector<double> values;
    for (const auto& v : *vals) {
      if (!v.is_number()) throw ConfigError("weight spec: non-numeric table entry");
      values.push_back(v.get<double>());
    }
    return custom_table(std::move(values));
  }
  throw ConfigError("weight spec: unknown family '" + name + "'");
}

nlohmann::json WeightSequence::to_json() const {
  nlohmann::json out;
  out["family"] = std::string(to_string(family_));
  switch (family_) {
    case WeightFamily::sobolev: out["p"] = parameter_; break;
    case WeightFamily::poly_decay:
    case WeightFamily::exp_decay: out["b"] = parameter_; break;
    case WeightFamily::norm: out["s"] = parameter_; break;
    case WeightFamily::constant: out["value"] = parameter_; break;
    case WeightFamily::custom_table: out["values"] = *table_; break;
  }
  return out;
}

void WeightSequence::check_index(std::int64_t j) const {
  if (j < 1) throw IndexDomainError("weight index must be >= 1, got " + std::to_string(j));
  if (family_ == WeightFamily::custom_table && static_cast<std::size_t>(j) > table_->size())
    throw IndexDomainError("index " + std::to_string(j) + " is past the end of a custom table of length " +
                           std::to_string(table_->size()));
}

double WeightSequence::operator()(std::int64_t j) const {
  check_index(j);
  const auto x = static_cast<double>(j);
  switch (family_) {
    case WeightFamily::sobolev: return std::pow(x, 2.0 * parameter_);
    case WeightFamily::poly_decay: return std::pow(x, -2.0 * parameter_);
    case WeightFamily::exp_decay: return std::exp(-std::pow(x, 2.0 * parameter_));
    case WeightFamily::norm: return std::pow(x, 2.0 * parameter_);
    case WeightFamily::constant: return parameter_;
    case WeightFamily::custom_table: return (*table_)[static_cast<std::size_t>(j - 1)];
  }
  return 0.0;
}

double WeightSequence::log_value(std::int64_t j) const {
  check_index(j);
  const auto x = static_cast<double>(j);
  switch (family_) {
    case WeightFamily::sobolev: return 2.0 * parameter_ * std::log(x);
    case WeightFamily::poly_decay: return -2.0 * parameter_ * std::log(x);
    case WeightFamily::exp_decay: return -std::pow(x, 2.0 * parameter_);
    case WeightFamily::norm: return 2.0 * parameter_ * std::log(x);
    case WeightFamily::constant: return std::log(parameter_);
    case WeightFamily::custom_table: return std::log((*table_)[static_cast<std::size_t>(j - 1)]);
  }
  return 0.0;
}

std::vector<double> WeightSequence::table(std::size_t n) const {
  std::vector<double> out(n);
  for (std::size_t j = 1; j <= n; ++j) out[j - 1] = (*this)(static_cast<std::int64_t>(j));
  return out;
}

std::vector<double> WeightSequence::log_table(std::size_t n) const {
  std::vector<double> out(n);
  for (std::size_t j = 1; j <= n; ++j) out[j - 1] = log_value(static_cast<std::int64_t>(j));
  return out;
}

std::optional<std::size_t> WeightSequence::size() const {
  if (family_ == WeightFamily::custom_table) return table_->size();
  return std::nullopt;
}

std::string WeightSequence::describe() const {
  std::ostringstream out;
  out << to_string(family_);
  switch (family_) {
    case WeightFamily::sobolev: out << "(p=" << parameter_ << ")"; break;
    case WeightFamily::poly_decay:
    case WeightFamily::exp_decay: out << "(b=" << parameter_ << ")"; break;
    case WeightFamily::norm: out << "(s=" << parameter_ << ")"; break;
    case WeightFamily::constant: out << "(" << parameter_ << ")"; break;
    case WeightFamily::custom_table: out << "[" << table_->size() << "]"; break;
  }
  return out.str();
}

double eval(const WeightSequence& seq, std::int64_t j) { return seq(j); }

std::string AdmissibilityReport::summary() const {
  if (pass()) return "pass";
  std::ostringstream out;
  const char* sep = "";
  if (normalization_violation) {
    out << "normalization fails for " << *normalization_violation;
    sep = "; ";
  }
  if (ratio_violation) {
    out << sep << "omega/s increases at j=" << *ratio_violation;
    sep = "; ";
  }
  if (decay_violation) out << sep << "b increases at j=" << *decay_violation;
  return out.str();
}

AdmissibilityReport check_admissible(const WeightSequence& omega, const WeightSequence& s,
                                     const WeightSequence& b, std::int64_t J) {
  if (J < 2) throw IndexDomainError("admissibility check needs J >= 2");
  constexpr double kLogTol = 1e-12;
  AdmissibilityReport report;

  std::string bad;
  for (auto [name, seq] : {std::pair{"omega", &omega}, std::pair{"s", &s}, std::pair{"b", &b}}) {
    // exp(-j^{2b}) starts at 1/e by construction; only its shape is checked.
    if (seq->family() == WeightFamily::exp_decay) continue;
    if (std::abs(seq->log_value(1)) > kLogTol) bad += bad.empty() ? name : std::string(",") + name;
  }
  if (!bad.empty()) report.normalization_violation = bad;

  double prev_ratio = omega.log_value(1) - s.log_value(1);
  double prev_b = b.log_value(1);
  for (std::int64_t j = 2; j <= J; ++j) {
    const double ratio = omega.log_value(j) - s.log_value(j);
    if (!report.ratio_violation && ratio > prev_ratio + kLogTol * std::max(1.0, std::abs(prev_ratio)))
      report.ratio_violation = j;
    const double lb = b.log_value(j);
    if (!report.decay_violation && lb > prev_b + kLogTol * std::max(1.0, std::abs(prev_b)))
      report.decay_violation = j;
    prev_ratio = ratio;
    prev_b = lb;
  }
  return report;
}

}  // namespace seqinv
