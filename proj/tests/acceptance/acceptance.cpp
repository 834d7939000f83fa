// Acceptance gate. Each criterion prints one PASS/FAIL line; with an integer
// argument only that criterion runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "seqinv/adaptive.hpp"
#include "seqinv/cli.hpp"
#include "seqinv/rng.hpp"
#include "seqinv/verify.hpp"

using namespace seqinv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * i / (n - 1)));
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

Outcome key_lemma() {
  const auto rep = key_lemma_trials(10000, 2024, 50);
  return {rep.passed(), std::to_string(rep.violations) + " violations in " + std::to_string(rep.trials) +
                            " bundles, worst margin " + fmt(rep.worst_margin)};
}

Outcome risk_bound_grid() {
  const auto params = ClassParams::mild(1, 1, 0, 1, 2);
  const auto inst = make_instance(SolutionKind::boundary_spread, OperatorKind::mid_class, params, 10000);
  std::vector<RiskReport> reports;
  std::string detail;
  for (double nu : {1e-2, 1e-3, 1e-4}) {
    McSettings cfg{.instance = inst, .noise = NoiseLevels(nu, nu)};
    cfg.replications = 2000;
    cfg.seed = 7;
    reports.push_back(mc_risk(cfg));
    detail += "nu=" + fmt(nu) + " risk=" + fmt(reports.back().risk_mean) +
              " bound=" + fmt(theorem22_bound(params, reports.back())) + "; ";
  }
  const auto check = check_theorem22(params, reports);
  return {check.passed(), detail};
}

Outcome rate_slope(IllPosedness family) {
  const bool mild = family == IllPosedness::mild;
  const auto params = mild ? ClassParams::mild(1, 1, 0, 1, 2) : ClassParams::severe(1, 1, 0, 1, 2);
  const auto grid = log_grid(1e-5, 1e-2, 8);
  const auto inst = make_instance(SolutionKind::boundary_spread, OperatorKind::mid_class, params, 100000);
  std::vector<std::pair<double, double>> points;
  for (double nu : grid) {
    McSettings cfg{.instance = inst, .noise = NoiseLevels(nu, nu * nu)};
    cfg.replications = 2000;
    cfg.seed = 11;
    cfg.family = family;
    points.emplace_back(nu, mc_risk(cfg).risk_mean);
  }
  const double expected = theoretical_nu_exponent(family, 1, 1, 0);
  const auto fit = rate_fit(points, expected, mild ? RateRegressor::log_noise : RateRegressor::log_abs_log_noise);
  const bool pass = mild ? (fit.slope >= 0.25 && fit.slope <= 0.55)
                         : (fit.slope < 0.0 && std::abs(fit.slope - expected) <= 0.3);
  return {pass, "slope " + fmt(fit.slope) + " (expected " + fmt(expected) + ")"};
}

Outcome adaptive_soundness() {
  const auto params = ClassParams::mild(1, 1, 0, 1, 2);
  const auto inst = make_instance(SolutionKind::boundary_spread, OperatorKind::mid_class, params, 10000);
  std::vector<RiskReport> reports;
  bool pass = true;
  std::string detail;
  for (double nu : {1e-2, 1e-3, 1e-4}) {
    McSettings cfg{.instance = inst, .noise = NoiseLevels(nu, nu)};
    cfg.replications = 5000;
    cfg.seed = 5;
    cfg.mode = EstimationMode::adaptive;
    const auto rep = mc_risk(cfg);
    pass = pass && rep.key_lemma_violations == 0 && rep.k_hat_out_of_range == 0 && std::isfinite(rep.benchmark_ratio);
    detail += "nu=" + fmt(nu) + " median=" + fmt(rep.risk_median) + " ratio=" + fmt(rep.benchmark_ratio) +
              " lemma-violations=" + std::to_string(rep.key_lemma_violations) + "; ";
    reports.push_back(rep);
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    // Rising only counts when the median intervals do not overlap.
    if (reports[i].median_lower > reports[i - 1].median_upper) pass = false;
  }
  return {pass, detail};
}

Outcome aux_bounds() {
  std::string detail;
  const auto mild = ClassParams::mild(1, 1, 0, 1, 2);
  const auto severe = ClassParams::severe(1, 1, 0, 1, 2);
  const auto inst = make_instance(SolutionKind::boundary_spread, OperatorKind::mid_class, mild, 1000);
  const std::vector<std::size_t> js{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> eps{0.04, 1e-3};
  const auto a1 = check_lemma_A1(js, inst, eps, 100000, 3);
  detail += "A1 " + std::to_string(a1.summary.violations) + "/" + std::to_string(a1.summary.trials) + "; ";

  const std::vector<double> nus{0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const auto a2m = check_lemma_A2(nus, mild.omega_seq, mild.b_seq, mild.d);
  const auto a2s = check_lemma_A2(nus, severe.omega_seq, severe.b_seq, severe.d);
  detail += "A2 mild " + std::to_string(a2m.summary.violations) + " severe " +
            std::to_string(a2s.summary.violations) + "; ";

  const std::vector<NoiseLevels> grid{NoiseLevels(1e-1, 1e-1), NoiseLevels(1e-2, 1e-2), NoiseLevels(1e-3, 1e-3)};
  const auto ev = event_probability_scan(inst, grid, 5000, 9);
  detail += "events";
  for (const auto& r : ev.rows)
    detail += " [eps=" + fmt(r.eps) + " " + fmt(r.freq_tilde_c) + "/" + fmt(r.freq_eps_c) + "/" + fmt(r.freq_mho_c) + "]";
  const bool pass = a1.summary.passed() && a2m.summary.passed() && a2s.summary.passed() && ev.summary.passed();
  return {pass, detail};
}

std::size_t brute_force_select(const std::vector<double>& S, const std::vector<double>& pen) {
  const std::size_t K = S.size();
  std::size_t best = 1;
  double best_value = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    double psi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = k; j <= K; ++j) psi = std::max(psi, S[j - 1] - S[k - 1] - pen[j - 1]);
    const double value = psi + pen[k - 1];
    if (k == 1 || value < best_value) {
      best = k;
      best_value = value;
    }
  }
  return best;
}

Outcome sweep_exactness() {
  std::size_t mismatches = 0, ties = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    DrawSequence rng(77, t);
    const std::size_t K = rng.index(1, 50);
    // Dyadic increments keep sums exact so ties are genuine.
    const bool coarse = t % 2 == 0;
    std::vector<double> S(K), pen(K);
    double s = 0.0, p = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double ds = coarse ? 0.125 * static_cast<double>(rng.index(0, 4)) : rng.uniform();
      const double dp = coarse ? 0.125 * static_cast<double>(rng.index(0, 2)) : rng.uniform() * 0.5;
      s += ds;
      p += (k == 0 ? 0.125 : dp);
      S[k] = s;
      pen[k] = p;
    }
    const auto trace = contrast_and_select(S, pen);
    const auto brute = brute_force_select(S, pen);
    if (trace.k_hat != brute) ++mismatches;
    for (std::size_t k = 1; k < K; ++k)
      if (trace.penalized[k] == trace.penalized[trace.k_hat - 1] && k + 1 != trace.k_hat) {
        ++ties;
        break;
      }
  }
  return {mismatches == 0,
          std::to_string(mismatches) + " mismatches in 1000 cases (" + std::to_string(ties) + " with ties)"};
}

int run_cli_capture(std::vector<std::string> args) {
  std::vector<char*> argv;
  static std::string prog = "seqinv";
  argv.push_back(prog.data());
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  return run_cli(static_cast<int>(argv.size()), argv.data(), sink, sink);
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("seqinv-accept-" + std::to_string(::getpid()));
  fs::create_directories(root);
  const fs::path config = root / "config.json";
  std::ofstream(config) << R"({"family": "mild", "p": 1, "b": 1, "s": 0, "r": 1, "d": 2,
  "instance": "boundary-spread", "operator": "mid-class", "nu_grid": [1e-2, 1e-3],
  "eps_policy": "equal", "replications": 400, "mode": "both"})";
  std::string detail;
  bool pass = true;
  std::vector<std::string> names;
  for (int workers : {1, 8}) {
    const auto out = root / ("w" + std::to_string(workers));
    const int code = run_cli_capture({"mc-risk", "--config", config.string(), "--seed", "3", "--workers",
                                      std::to_string(workers), "--out", out.string()});
    if (code != 0) {
      pass = false;
      detail += "exit " + std::to_string(code) + " with workers " + std::to_string(workers) + "; ";
    }
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(root / "w1")) {
    if (entry.path().extension() != ".csv") continue;
    const auto other = root / "w8" / entry.path().filename();
    std::ifstream a(entry.path(), std::ios::binary), b(other, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    ++compared;
    if (!b || sa != sb) {
      pass = false;
      detail += entry.path().filename().string() + " differs; ";
    }
  }
  pass = pass && compared > 0;
  detail += std::to_string(compared) + " CSV files compared";
  fs::remove_all(root);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle inequality on 10000 random bundles", key_lemma},
      {"minimax upper bound at nu = eps in {1e-2, 1e-3, 1e-4}", risk_bound_grid},
      {"mild rate exponent", [] { return rate_slope(IllPosedness::mild); }},
      {"severe rate against log|log nu|", [] { return rate_slope(IllPosedness::severe); }},
      {"adaptive procedure soundness", adaptive_soundness},
      {"ratio, delta-scale and event-frequency bounds", aux_bounds},
      {"selection sweep exactness", sweep_exactness},
      {"mc-risk determinism across worker counts", determinism},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s -- %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", id,
                criteria[i].first.c_str(), outcome.detail.c_str(), secs);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
