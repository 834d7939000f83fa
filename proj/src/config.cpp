#include "seqinv/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "seqinv/errors.hpp"

namespace seqinv {

namespace {

using nlohmann::json;

template <class T>
T field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
void read(const json& doc, const char* key, T& target) {
  if (doc.contains(key)) target = field<T>(doc, key);
}

void check_unit_interval(const std::vector<double>& grid, const char* key) {
  if (grid.empty()) throw ConfigError(std::string("field '") + key + "': grid is empty");
  for (double x : grid)
    if (!(x > 0.0 && x < 1.0)) throw ConfigError(std::string("field '") + key + "': values must lie in (0,1)");
}

EpsPolicy parse_eps_policy(const std::string& tag) {
  if (tag == "fixed") return EpsPolicy::fixed;
  if (tag == "equal") return EpsPolicy::equal;
  if (tag == "power") return EpsPolicy::power;
  throw ConfigError("field 'eps_policy': unknown policy '" + tag + "'");
}

}  // namespace

std::string_view to_string(EpsPolicy policy) {
  switch (policy) {
    case EpsPolicy::fixed: return "fixed";
    case EpsPolicy::equal: return "equal";
    case EpsPolicy::power: return "power";
  }
  return "equal";
}

std::string_view to_string(ModeSelection mode) {
  switch (mode) {
    case ModeSelection::oracle: return "oracle";
    case ModeSelection::adaptive: return "adaptive";
    case ModeSelection::both: return "both";
  }
  return "oracle";
}

ModeSelection parse_mode_selection(std::string_view tag) {
  if (tag == "oracle") return ModeSelection::oracle;
  if (tag == "adaptive") return ModeSelection::adaptive;
  if (tag == "both") return ModeSelection::both;
  throw ConfigError("unknown mode '" + std::string(tag) + "'");
}

void ExperimentConfig::validate() const {
  if (family != "mild" && family != "severe" && family != "custom")
    throw ConfigError("field 'family': expected mild, severe or custom");
  if (family == "custom" && !(omega_weights && s_weights && b_weights))
    throw ConfigError("custom family needs 'omega_weights', 's_weights' and 'b_weights'");
  class_params().validate();
  parse_solution_kind(instance);
  parse_operator_kind(op);
  check_unit_interval(nu_grid, "nu_grid");
  check_unit_interval(eps_grid, "eps_grid");
  if (eps_policy == EpsPolicy::fixed && !(eps > 0.0 && eps < 1.0))
    throw ConfigError("field 'eps': must lie in (0,1)");
  if (eps_policy == EpsPolicy::power && !(eps_exponent > 0.0))
    throw ConfigError("field 'eps_exponent': must be positive");
  if (replications < 1) throw ConfigError("field 'replications': must be >= 1");
  if (!(penalty_constant > 0.0)) throw ConfigError("field 'penalty_constant': must be positive");
  if (!(deterministic_constant > 0.0)) throw ConfigError("field 'deterministic_constant': must be positive");
  if (j_cap < 1) throw ConfigError("field 'j_cap': must be >= 1");
  if (workers < 1) throw ConfigError("field 'workers': must be >= 1");
  if (max_K < 1) throw ConfigError("field 'max_K': must be >= 1");
  if (j_grid.empty() || std::find(j_grid.begin(), j_grid.end(), 0) != j_grid.end())
    throw ConfigError("field 'j_grid': indices must be >= 1");
}

ClassParams ExperimentConfig::class_params() const {
  if (family == "mild") return ClassParams::mild(p, b, s, r, d);
  if (family == "severe") return ClassParams::severe(p, b, s, r, d);
  ClassParams params;
  params.r = r;
  params.d = d;
  params.omega_seq = WeightSequence::from_json(*omega_weights);
  params.s_seq = WeightSequence::from_json(*s_weights);
  params.b_seq = WeightSequence::from_json(*b_weights);
  return params;
}

std::optional<IllPosedness> ExperimentConfig::ill_posedness() const {
  if (family == "mild") return IllPosedness::mild;
  if (family == "severe") return IllPosedness::severe;
  return std::nullopt;
}

NoiseLevels ExperimentConfig::noise_for(double nu) const {
  switch (eps_policy) {
    case EpsPolicy::fixed: return NoiseLevels(nu, eps);
    case EpsPolicy::equal: return NoiseLevels(nu, nu);
    case EpsPolicy::power: return NoiseLevels(nu, std::pow(nu, eps_exponent));
  }
  return NoiseLevels(nu, nu);
}

std::vector<NoiseLevels> ExperimentConfig::noise_grid() const {
  std::vector<NoiseLevels> out;
  for (double nu : nu_grid) out.push_back(noise_for(nu));
  return out;
}

std::size_t ExperimentConfig::grid_length() const {
  std::size_t J = 1;
  for (const auto& noise : noise_grid()) J = std::max(J, truncation_length(noise, j_cap));
  return J;
}

ProblemInstance ExperimentConfig::make_problem(std::size_t J) const {
  return make_instance(parse_solution_kind(instance), parse_operator_kind(op), class_params(), J);
}

nlohmann::json ExperimentConfig::to_json() const {
  json doc{{"family", family},
           {"p", p},
           {"b", b},
           {"s", s},
           {"r", r},
           {"d", d},
           {"instance", instance},
           {"operator", op},
           {"nu_grid", nu_grid},
           {"eps_policy", std::string(to_string(eps_policy))},
           {"eps", eps},
           {"eps_exponent", eps_exponent},
           {"eps_grid", eps_grid},
           {"j_grid", j_grid},
           {"replications", replications},
           {"seed", seed},
           {"mode", std::string(to_string(mode))},
           {"penalty_constant", penalty_constant},
           {"deterministic_constant", deterministic_constant},
           {"j_cap", j_cap},
           {"trials", trials},
           {"max_K", max_K},
           {"k", k},
           {"replication", replication},
           {"workers", workers},
           {"out", out}};
  if (omega_weights) doc["omega_weights"] = *omega_weights;
  if (s_weights) doc["s_weights"] = *s_weights;
  if (b_weights) doc["b_weights"] = *b_weights;
  return doc;
}

std::string ExperimentConfig::hash() const {
  auto doc = to_json();
  doc.erase("workers");
  doc.erase("out");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "family",       "p",        "b",        "s",           "r",         "d",           "omega_weights",
      "s_weights",    "b_weights", "instance", "operator",    "nu_grid",   "eps_policy",  "eps",
      "eps_exponent", "eps_grid", "j_grid",   "replications", "seed",     "mode",        "penalty_constant",
      "deterministic_constant",   "j_cap",    "trials",      "max_K",     "k",           "replication",
      "workers",      "out"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) throw ConfigError("unknown field '" + key + "'");

  ExperimentConfig cfg;
  read(doc, "family", cfg.family);
  read(doc, "p", cfg.p);
  read(doc, "b", cfg.b);
  read(doc, "s", cfg.s);
  read(doc, "r", cfg.r);
  read(doc, "d", cfg.d);
  if (doc.contains("omega_weights")) cfg.omega_weights = doc["omega_weights"];
  if (doc.contains("s_weights")) cfg.s_weights = doc["s_weights"];
  if (doc.contains("b_weights")) cfg.b_weights = doc["b_weights"];
  read(doc, "instance", cfg.instance);
  read(doc, "operator", cfg.op);
  read(doc, "nu_grid", cfg.nu_grid);
  if (doc.contains("eps_policy")) cfg.eps_policy = parse_eps_policy(field<std::string>(doc, "eps_policy"));
  read(doc, "eps", cfg.eps);
  read(doc, "eps_exponent", cfg.eps_exponent);
  read(doc, "eps_grid", cfg.eps_grid);
  read(doc, "j_grid", cfg.j_grid);
  read(doc, "replications", cfg.replications);
  read(doc, "seed", cfg.seed);
  if (doc.contains("mode")) cfg.mode = parse_mode_selection(field<std::string>(doc, "mode"));
  read(doc, "penalty_constant", cfg.penalty_constant);
  read(doc, "deterministic_constant", cfg.deterministic_constant);
  read(doc, "j_cap", cfg.j_cap);
  read(doc, "trials", cfg.trials);
  read(doc, "max_K", cfg.max_K);
  read(doc, "k", cfg.k);
  read(doc, "replication", cfg.replication);
  read(doc, "workers", cfg.workers);
  read(doc, "out", cfg.out);
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig config_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << "config syntax error at line " << line << ", column " << column << ": " << e.what();
    throw ConfigError(msg.str());
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_text(text.str());
}

}  // namespace seqinv
