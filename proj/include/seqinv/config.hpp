#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqinv/model.hpp"
#include "seqinv/oracle.hpp"
#include "seqinv/verify.hpp"

namespace seqinv {

enum class EpsPolicy { fixed, equal, power };
enum class ModeSelection { oracle, adaptive, both };

/// Flat experiment description. Keys of the JSON file mirror the field names.
struct ExperimentConfig {
  std::string family = "mild";  // mild | severe | custom
  double p = 1.0, b = 1.0, s = 0.0, r = 1.0, d = 2.0;
  // Weight specs for the custom family, e.g. {"family": "sobolev", "p": 1}.
  std::optional<nlohmann::json> omega_weights, s_weights, b_weights;
  std::string instance = "boundary-spread";
  std::string op = "mid-class";
  std::vector<double> nu_grid{1e-2, 1e-3, 1e-4};
  EpsPolicy eps_policy = EpsPolicy::equal;
  double eps = 1e-3;           // fixed policy
  double eps_exponent = 2.0;   // power policy: eps = nu^exponent
  std::vector<double> eps_grid{1e-1, 1e-2, 1e-3};
  std::vector<std::size_t> j_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t replications = 200;
  std::uint64_t seed = 0;
  ModeSelection mode = ModeSelection::oracle;
  double penalty_constant = kDefaultPenaltyConstant;
  double deterministic_constant = kDefaultDeterministicPenaltyConstant;
  std::size_t j_cap = kDefaultJCap;
  std::size_t trials = 10000;
  std::size_t max_K = 50;
  std::size_t k = 0;            // estimate: 0 selects adaptively
  std::size_t replication = 0;  // simulate / estimate
  unsigned workers = 1;
  std::string out = "out";

  void validate() const;
  ClassParams class_params() const;
  std::optional<IllPosedness> ill_posedness() const;
  NoiseLevels noise_for(double nu) const;
  std::vector<NoiseLevels> noise_grid() const;
  /// Largest truncation length over the noise grid.
  std::size_t grid_length() const;
  ProblemInstance make_problem(std::size_t J) const;

  nlohmann::json to_json() const;
  /// FNV-1a over the canonical JSON without `workers` and `out`.
  std::string hash() const;
};

std::string_view to_string(EpsPolicy policy);
std::string_view to_string(ModeSelection mode);
ModeSelection parse_mode_selection(std::string_view tag);

/// Throws ConfigError naming the offending field, or line/column for syntax.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace seqinv
