#include "seqinv/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "seqinv/config.hpp"
#include "seqinv/errors.hpp"
#include "seqinv/io.hpp"

#ifndef SEQINV_VERSION
#define SEQINV_VERSION "0.1.0"
#endif

namespace seqinv {

namespace fs = std::filesystem;

std::string version_string() { return SEQINV_VERSION; }

namespace {

std::vector<std::string> meta_lines(const ExperimentConfig& cfg, std::string_view command) {
  return {"seqinv " + version_string() + " " + std::string(command),
          "config_hash=" + cfg.hash() + " seed=" + std::to_string(cfg.seed),
          "penalty_constant=" + format_double(cfg.penalty_constant) +
              " deterministic_constant=" + format_double(cfg.deterministic_constant) + " log_base=e"};
}

std::string fmt_index(std::size_t v) { return std::to_string(v); }

std::vector<EstimationMode> modes_of(ModeSelection mode) {
  switch (mode) {
    case ModeSelection::oracle: return {EstimationMode::oracle};
    case ModeSelection::adaptive: return {EstimationMode::adaptive};
    case ModeSelection::both: return {EstimationMode::oracle, EstimationMode::adaptive};
  }
  return {EstimationMode::oracle};
}

std::vector<RiskReport> run_grid(const ExperimentConfig& cfg, const ProblemInstance& inst, EstimationMode mode) {
  std::vector<RiskReport> reports;
  for (const auto& noise : cfg.noise_grid()) {
    McSettings settings{.instance = inst, .noise = noise};
    settings.replications = cfg.replications;
    settings.seed = cfg.seed;
    settings.mode = mode;
    settings.penalty_constant = cfg.penalty_constant;
    settings.j_cap = cfg.j_cap;
    settings.workers = cfg.workers;
    settings.family = cfg.ill_posedness();
    reports.push_back(mc_risk(settings));
  }
  return reports;
}

ObservationSet one_observation(const ExperimentConfig& cfg, ProblemInstance& inst) {
  const auto noise = cfg.noise_for(cfg.nu_grid.front());
  inst = cfg.make_problem(truncation_length(noise, cfg.j_cap));
  return simulate(inst, noise, cfg.seed, cfg.replication);
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  ProblemInstance inst;
  const auto obs = one_observation(cfg, inst);
  auto table = observation_table(obs);
  table.meta = meta_lines(cfg, "simulate");
  const fs::path dir(cfg.out);
  write_atomic(dir / "observations.csv", table.render());
  const nlohmann::json sidecar{{"seed", obs.seed},         {"replication", obs.replication},
                               {"nu", obs.noise.nu},       {"eps", obs.noise.eps},
                               {"J", obs.J},               {"config_hash", cfg.hash()},
                               {"version", version_string()}};
  write_atomic(dir / "observations.meta.json", sidecar.dump(2) + "\n");
  out << "wrote " << obs.J << " observations to " << (dir / "observations.csv").string() << "\n";
  return kExitOk;
}

int cmd_estimate(const ExperimentConfig& cfg, std::ostream& out) {
  ProblemInstance inst;
  const auto obs = one_observation(cfg, inst);
  const auto& omega = inst.params.omega_seq;
  auto table = CsvTable{meta_lines(cfg, "estimate"), {"j", "coefficient", "truth"}, {}};
  EstimatorOutput est;
  if (cfg.k > 0) {
    if (cfg.k > obs.J) throw ConfigError("field 'k': exceeds the truncation length " + std::to_string(obs.J));
    est = estimate(obs, cfg.k, omega);
    table.meta.push_back("k=" + fmt_index(cfg.k));
  } else {
    const auto res = adaptive_estimate(obs, omega, cfg.penalty_constant);
    est = res.selected;
    table.meta.push_back("k_hat=" + fmt_index(res.trace.k_hat) + " K_hat=" + fmt_index(res.bounds.hat.K));
  }
  const double risk = risk_error_sq(est, inst, omega);
  table.meta.push_back("error_sq=" + format_double(risk));
  for (std::size_t j = 1; j <= est.k; ++j)
    table.add_row({fmt_index(j), format_double(est.coeffs[j - 1]), format_double(inst.coeffs[j - 1])});
  write_atomic(fs::path(cfg.out) / "estimate.csv", table.render());
  out << "k=" << est.k << " error_sq=" << format_double(risk) << "\n";
  return kExitOk;
}

CsvTable risk_table(const ExperimentConfig& cfg, std::string_view command) {
  return CsvTable{meta_lines(cfg, command),
                  {"mode",          "nu",           "eps",         "J",           "replications", "risk_mean",
                   "risk_std_err",  "risk_median",  "median_lower", "median_upper", "k_min",       "k_median",
                   "k_max",         "K_hat_min",    "K_hat_max",   "k_star",      "psi_nu",       "upsilon",
                   "eta",           "psi_diamond",  "theoretical_rate", "benchmark_ratio", "key_lemma_violations",
                   "k_hat_out_of_range"},
                  {}};
}

void add_risk_row(CsvTable& table, const RiskReport& r) {
  const auto& bm = r.benchmark;
  const bool adaptive = r.mode == EstimationMode::adaptive;
  table.add_row({std::string(to_string(r.mode)), format_double(r.nu), format_double(r.eps), fmt_index(r.J),
                 fmt_index(r.replications), format_double(r.risk_mean), format_double(r.risk_std_err),
                 format_double(r.risk_median), format_double(r.median_lower), format_double(r.median_upper),
                 fmt_index(r.k_min), fmt_index(r.k_median), fmt_index(r.k_max),
                 adaptive ? fmt_index(r.bound_min) : "", adaptive ? fmt_index(r.bound_max) : "",
                 fmt_index(bm.k_star), format_double(bm.psi_nu), format_double(bm.upsilon_eps),
                 format_double(bm.eta), format_double(bm.psi_diamond),
                 bm.theoretical_rate ? format_double(*bm.theoretical_rate) : "",
                 adaptive ? format_double(r.benchmark_ratio) : "", adaptive ? fmt_index(r.key_lemma_violations) : "",
                 adaptive ? fmt_index(r.k_hat_out_of_range) : ""});
}

int cmd_mc_risk(const ExperimentConfig& cfg, std::ostream& out) {
  const auto inst = cfg.make_problem(cfg.grid_length());
  auto table = risk_table(cfg, "mc-risk");
  for (auto mode : modes_of(cfg.mode))
    for (const auto& r : run_grid(cfg, inst, mode)) {
      add_risk_row(table, r);
      out << to_string(mode) << " nu=" << format_double(r.nu) << " risk=" << format_double(r.risk_mean) << "\n";
    }
  write_atomic(fs::path(cfg.out) / "mc_risk.csv", table.render());
  return kExitOk;
}

int cmd_rate_fit(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.nu_grid.size() < 3) throw ConfigError("field 'nu_grid': rate fit needs at least 3 points");
  const auto inst = cfg.make_problem(cfg.grid_length());
  const auto family = cfg.ill_posedness();
  const auto regressor =
      family == IllPosedness::severe ? RateRegressor::log_abs_log_noise : RateRegressor::log_noise;
  const double expected = family ? theoretical_nu_exponent(*family, cfg.p, cfg.b, cfg.s)
                                 : std::numeric_limits<double>::quiet_NaN();
  for (auto mode : modes_of(cfg.mode)) {
    const auto reports = run_grid(cfg, inst, mode);
    std::vector<std::pair<double, double>> points;
    for (const auto& r : reports) points.emplace_back(r.nu, r.risk_mean);
    const auto fit = rate_fit(points, expected, regressor);
    const std::string x_label = regressor == RateRegressor::log_noise ? "log nu" : "log |log nu|";

    CsvTable table{meta_lines(cfg, "rate-fit"), {"nu", "eps", "regressor", "log_risk", "fitted"}, {}};
    table.meta.push_back("mode=" + std::string(to_string(mode)) + " regressor=" + x_label);
    table.meta.push_back("slope=" + format_double(fit.slope) + " intercept=" + format_double(fit.intercept) +
                         " residual_rms=" + format_double(fit.residual_rms) +
                         " expected_slope=" + format_double(fit.expected_slope));
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& [x, y] = fit.points[i];
      table.add_row({format_double(reports[i].nu), format_double(reports[i].eps), format_double(x), format_double(y),
                     format_double(fit.intercept + fit.slope * x)});
    }
    const std::string stem = "rate_fit_" + std::string(to_string(mode));
    write_atomic(fs::path(cfg.out) / (stem + ".csv"), table.render());
    write_atomic(fs::path(cfg.out) / (stem + ".svg"),
                 render_rate_svg(fit, cfg.family + " family, " + std::string(to_string(mode)) + " dimension", x_label));
    out << to_string(mode) << " slope=" << format_double(fit.slope) << " expected=" << format_double(expected)
        << "\n";
  }
  return kExitOk;
}

void add_summary(CsvTable& table, const LemmaCheckReport& report) {
  table.meta.push_back("trials=" + fmt_index(report.trials) + " violations=" + fmt_index(report.violations) +
                       " worst_margin=" + format_double(report.worst_margin));
  for (const auto& note : report.notes) table.meta.push_back("note: " + note);
}

int finish_check(const ExperimentConfig& cfg, const std::string& tag, CsvTable& table, const LemmaCheckReport& report,
                 std::ostream& out) {
  add_summary(table, report);
  write_atomic(fs::path(cfg.out) / ("check_" + tag + ".csv"), table.render());
  out << tag << ": " << (report.passed() ? "pass" : "FAIL") << " (" << report.violations << " violations in "
      << report.trials << " trials, worst margin " << format_double(report.worst_margin) << ")\n";
  return report.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_check(const ExperimentConfig& cfg, const std::string& tag, std::ostream& out) {
  CsvTable table{meta_lines(cfg, "check " + tag), {}, {}};
  const auto params = cfg.class_params();
  if (tag == "key-lemma") {
    const auto report = key_lemma_trials(cfg.trials, cfg.seed, cfg.max_K);
    table.header = {"trials", "violations", "worst_margin"};
    table.add_row({fmt_index(report.trials), fmt_index(report.violations), format_double(report.worst_margin)});
    return finish_check(cfg, tag, table, report, out);
  }
  if (tag == "thm22") {
    const auto inst = cfg.make_problem(cfg.grid_length());
    const auto reports = run_grid(cfg, inst, EstimationMode::oracle);
    const auto report = check_theorem22(params, reports);
    table.header = {"nu", "eps", "risk_mean", "risk_std_err", "bound", "pass"};
    for (const auto& r : reports) {
      const double bound = theorem22_bound(params, r);
      table.add_row({format_double(r.nu), format_double(r.eps), format_double(r.risk_mean),
                     format_double(r.risk_std_err), format_double(bound),
                     r.risk_mean - 3.0 * r.risk_std_err <= bound ? "1" : "0"});
    }
    return finish_check(cfg, tag, table, report, out);
  }
  if (tag == "a1") {
    const auto J = *std::max_element(cfg.j_grid.begin(), cfg.j_grid.end());
    const auto inst = cfg.make_problem(J);
    const auto report = check_lemma_A1(cfg.j_grid, inst, cfg.eps_grid, cfg.replications, cfg.seed);
    table.header = {"j", "eps", "a", "item", "estimate", "std_err", "bound"};
    for (const auto& row : report.rows)
      table.add_row({fmt_index(row.j), format_double(row.eps), format_double(row.a), std::to_string(row.item),
                     format_double(row.estimate), format_double(row.std_err), format_double(row.bound)});
    return finish_check(cfg, tag, table, report.summary, out);
  }
  if (tag == "a2") {
    const auto report = check_lemma_A2(cfg.nu_grid, params.omega_seq, params.b_seq, params.d);
    table.header = {"nu", "n_plus", "delta", "scaled", "bound"};
    for (const auto& row : report.rows)
      table.add_row({format_double(row.nu), fmt_index(row.n_plus), format_double(row.delta),
                     format_double(row.scaled), format_double(row.bound)});
    return finish_check(cfg, tag, table, report.summary, out);
  }
  if (tag == "events") {
    // Each eps in the grid is paired with nu = eps.
    std::vector<NoiseLevels> grid;
    std::size_t J = 1;
    for (double eps : cfg.eps_grid) {
      grid.emplace_back(eps, eps);
      J = std::max(J, truncation_length(grid.back(), cfg.j_cap));
    }
    const auto inst = cfg.make_problem(J);
    const PenaltyConstants constants{cfg.penalty_constant, cfg.deterministic_constant};
    const auto report = event_probability_scan(inst, grid, cfg.replications, cfg.seed, constants, cfg.workers);
    table.header = {"nu", "eps", "replications", "freq_tilde_c", "se_tilde_c", "freq_eps_c", "se_eps_c",
                    "freq_mho_c", "se_mho_c", "implied_tilde", "implied_eps", "omega_eps_count",
                    "sandwich_failures", "omega_tilde_count", "bracket_failures"};
    for (const auto& r : report.rows)
      table.add_row({format_double(r.nu), format_double(r.eps), fmt_index(r.replications),
                     format_double(r.freq_tilde_c), format_double(r.se_tilde_c), format_double(r.freq_eps_c),
                     format_double(r.se_eps_c), format_double(r.freq_mho_c), format_double(r.se_mho_c),
                     format_double(r.implied_tilde), format_double(r.implied_eps), fmt_index(r.omega_eps_count),
                     fmt_index(r.sandwich_failures_on_omega_eps), fmt_index(r.omega_tilde_count),
                     fmt_index(r.bracket_failures_on_omega_tilde)});
    return finish_check(cfg, tag, table, report.summary, out);
  }
  if (tag == "condL") {
    const auto report = check_condition_L(params.b_seq, params.d, cfg.eps_grid);
    LemmaCheckReport summary;
    summary.tag = tag;
    summary.trials = 1;
    summary.violations = report.growing ? 1 : 0;
    summary.worst_margin = report.growing ? -1.0 : 1.0;
    summary.notes.push_back("M+ is the M-bound on sqrt(4d b); the width parameter is the operator-class d");
    table.header = {"eps", "m_plus", "log_value"};
    for (std::size_t i = 0; i < report.eps.size(); ++i)
      table.add_row({format_double(report.eps[i]), fmt_index(report.m_plus[i]), format_double(report.log_values[i])});
    table.meta.push_back("L=" + format_double(report.L) + " growing=" + (report.growing ? "1" : "0"));
    return finish_check(cfg, tag, table, summary, out);
  }
  throw ConfigError("unknown check '" + tag + "' (expected key-lemma, thm22, a1, a2, events or condL)");
}

int cmd_oracle_table(const ExperimentConfig& cfg, std::ostream& out) {
  const auto params = cfg.class_params();
  CsvTable table{meta_lines(cfg, "oracle-table"),
                 {"nu", "eps", "k_star", "psi_nu", "upsilon", "upsilon_argmax", "eta", "psi_diamond", "k_minus",
                  "theoretical_rate", "cap_limited"},
                 {}};
  for (const auto& noise : cfg.noise_grid()) {
    const auto r = oracle_report(params, noise, truncation_length(noise, cfg.j_cap), cfg.ill_posedness());
    table.add_row({format_double(r.nu), format_double(r.eps), fmt_index(r.k_star), format_double(r.psi_nu),
                   format_double(r.upsilon_eps), fmt_index(r.upsilon_argmax), format_double(r.eta),
                   format_double(r.psi_diamond), fmt_index(r.k_minus),
                   r.theoretical_rate ? format_double(*r.theoretical_rate) : "", r.cap_limited ? "1" : "0"});
    out << "nu=" << format_double(r.nu) << " k_star=" << r.k_star << " psi_nu=" << format_double(r.psi_nu) << "\n";
  }
  write_atomic(fs::path(cfg.out) / "oracle_table.csv", table.render());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification harness for sequence-space inverse problems", "seqinv"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_dir, mode;
  double penalty_constant = 0.0;
  std::size_t trials = 0, k = 0;

  auto* opt_config = app.add_option("--config", config_path, "JSON experiment file")->check(CLI::ExistingFile);
  auto* opt_seed = app.add_option("--seed", seed, "base seed");
  auto* opt_workers = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* opt_out = app.add_option("--out", out_dir, "output directory");
  auto* opt_pen = app.add_option("--penalty-constant", penalty_constant, "data-driven penalty constant");
  auto* opt_mode = app.add_option("--mode", mode, "oracle, adaptive or both")
                       ->check(CLI::IsMember({"oracle", "adaptive", "both"}));
  auto* opt_trials = app.add_option("--trials", trials, "randomized trials for key-lemma");
  opt_config->configurable(false);

  auto* simulate_cmd = app.add_subcommand("simulate", "write one observation set");
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate from one observation set");
  auto* opt_k = estimate_cmd->add_option("--k", k, "fixed dimension (default: adaptive)");
  auto* mc_cmd = app.add_subcommand("mc-risk", "Monte Carlo risk over the noise grid");
  auto* rate_cmd = app.add_subcommand("rate-fit", "fit log-log rate exponents");
  auto* check_cmd = app.add_subcommand("check", "run one verification check");
  std::string check_tag;
  check_cmd->add_option("tag", check_tag, "key-lemma, thm22, a1, a2, events or condL")
      ->required()
      ->check(CLI::IsMember({"key-lemma", "thm22", "a1", "a2", "events", "condL"}));
  auto* oracle_cmd = app.add_subcommand("oracle-table", "oracle quantities over the noise grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    ExperimentConfig cfg;
    if (opt_config->count()) cfg = load_config(config_path);
    if (opt_seed->count()) cfg.seed = seed;
    if (opt_workers->count()) cfg.workers = workers;
    if (opt_out->count()) cfg.out = out_dir;
    if (opt_pen->count()) cfg.penalty_constant = penalty_constant;
    if (opt_mode->count()) cfg.mode = parse_mode_selection(mode);
    if (opt_trials->count()) cfg.trials = trials;
    if (opt_k->count()) cfg.k = k;
    cfg.validate();

    if (*simulate_cmd) return cmd_simulate(cfg, out);
    if (*estimate_cmd) return cmd_estimate(cfg, out);
    if (*mc_cmd) return cmd_mc_risk(cfg, out);
    if (*rate_cmd) return cmd_rate_fit(cfg, out);
    if (*check_cmd) return cmd_check(cfg, check_tag, out);
    if (*oracle_cmd) return cmd_oracle_table(cfg, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace seqinv
