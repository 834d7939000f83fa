#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "seqinv/adaptive.hpp"
#include "seqinv/cli.hpp"
#include "seqinv/errors.hpp"
#include "seqinv/estimator.hpp"
#include "seqinv/model.hpp"
#include "seqinv/oracle.hpp"
#include "seqinv/verify.hpp"
#include "seqinv/weights.hpp"

namespace py = pybind11;
using namespace seqinv;

namespace {

py::dict oracle_dict(const OracleReport& r) {
  py::dict d;
  d["nu"] = r.nu;
  d["eps"] = r.eps;
  d["k_star"] = r.k_star;
  d["psi_nu"] = r.psi_nu;
  d["upsilon_eps"] = r.upsilon_eps;
  d["upsilon_argmax"] = r.upsilon_argmax;
  d["eta"] = r.eta;
  d["psi_diamond"] = r.psi_diamond;
  d["k_minus"] = r.k_minus;
  d["theoretical_rate"] = r.theoretical_rate;
  d["cap_limited"] = r.cap_limited;
  return d;
}

py::dict risk_dict(const RiskReport& r) {
  py::dict d;
  d["nu"] = r.nu;
  d["eps"] = r.eps;
  d["mode"] = std::string(to_string(r.mode));
  d["replications"] = r.replications;
  d["risk_mean"] = r.risk_mean;
  d["risk_std_err"] = r.risk_std_err;
  d["risk_median"] = r.risk_median;
  d["median_lower"] = r.median_lower;
  d["median_upper"] = r.median_upper;
  d["k_min"] = r.k_min;
  d["k_median"] = r.k_median;
  d["k_max"] = r.k_max;
  d["bound_min"] = r.bound_min;
  d["bound_max"] = r.bound_max;
  d["key_lemma_violations"] = r.key_lemma_violations;
  d["benchmark_ratio"] = r.benchmark_ratio;
  d["benchmark"] = oracle_dict(r.benchmark);
  d["risks"] = r.risks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral cut-off estimation with a noisy operator";
  m.attr("__version__") = version_string();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<IndexDomainError>(m, "IndexDomainError", PyExc_IndexError);

  py::class_<WeightSequence>(m, "WeightSequence")
      .def_static("sobolev", &WeightSequence::sobolev, py::arg("p"))
      .def_static("poly_decay", &WeightSequence::poly_decay, py::arg("b"))
      .def_static("exp_decay", &WeightSequence::exp_decay, py::arg("b"))
      .def_static("norm", &WeightSequence::norm, py::arg("s"))
      .def_static("constant", &WeightSequence::constant, py::arg("value") = 1.0)
      .def_static("custom_table", &WeightSequence::custom_table, py::arg("values"))
      .def("__call__", [](const WeightSequence& w, std::int64_t j) { return eval(w, j); })
      .def("log_value", &WeightSequence::log_value)
      .def("__repr__", [](const WeightSequence& w) { return "WeightSequence(" + w.to_json().dump() + ")"; });

  py::class_<ClassParams>(m, "ClassParams")
      .def_static("mild", &ClassParams::mild, py::arg("p"), py::arg("b"), py::arg("s") = 0.0, py::arg("r") = 1.0,
                  py::arg("d") = 2.0)
      .def_static("severe", &ClassParams::severe, py::arg("p"), py::arg("b"), py::arg("s") = 0.0,
                  py::arg("r") = 1.0, py::arg("d") = 2.0)
      .def_readonly("r", &ClassParams::r)
      .def_readonly("d", &ClassParams::d)
      .def_readonly("s_seq", &ClassParams::s_seq)
      .def_readonly("b_seq", &ClassParams::b_seq)
      .def_readonly("omega_seq", &ClassParams::omega_seq);

  py::class_<NoiseLevels>(m, "NoiseLevels")
      .def(py::init<double, double>(), py::arg("nu"), py::arg("eps"))
      .def_readonly("nu", &NoiseLevels::nu)
      .def_readonly("eps", &NoiseLevels::eps);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readonly("coeffs", &ProblemInstance::coeffs)
      .def_readonly("eigenvalues", &ProblemInstance::eigenvalues)
      .def_readonly("log_eigenvalues", &ProblemInstance::log_eigenvalues)
      .def_readonly("params", &ProblemInstance::params)
      .def_property_readonly("J", &ProblemInstance::J);

  m.def(
      "make_instance",
      [](const ClassParams& params, std::size_t J, const std::string& solution, const std::string& op) {
        return make_instance(parse_solution_kind(solution), parse_operator_kind(op), params, J);
      },
      py::arg("params"), py::arg("J"), py::arg("solution") = "boundary-spread", py::arg("operator") = "mid-class");

  m.def("truncation_length", &truncation_length, py::arg("noise"), py::arg("j_cap") = kDefaultJCap);

  py::class_<ObservationSet>(m, "ObservationSet")
      .def_readonly("Y", &ObservationSet::Y)
      .def_readonly("X", &ObservationSet::X)
      .def_readonly("noise", &ObservationSet::noise)
      .def_readonly("J", &ObservationSet::J)
      .def_readonly("seed", &ObservationSet::seed)
      .def_readonly("replication", &ObservationSet::replication);

  m.def("simulate", &simulate, py::arg("instance"), py::arg("noise"), py::arg("seed"), py::arg("replication") = 0,
        py::arg("length") = py::none());

  py::class_<EstimatorOutput>(m, "EstimatorOutput")
      .def_readonly("k", &EstimatorOutput::k)
      .def_readonly("coeffs", &EstimatorOutput::coeffs)
      .def_readonly("prefix_norms", &EstimatorOutput::prefix_norms);

  m.def("estimate", py::overload_cast<const ObservationSet&, std::size_t, const WeightSequence&>(&estimate),
        py::arg("obs"), py::arg("k"), py::arg("omega"));
  m.def("risk_error_sq",
        py::overload_cast<const EstimatorOutput&, const ProblemInstance&, const WeightSequence&>(&risk_error_sq),
        py::arg("est"), py::arg("instance"), py::arg("omega"));

  m.def(
      "oracle_k",
      [](double nu, const ClassParams& p) {
        const auto o = oracle_k(nu, p.omega_seq, p.s_seq, p.b_seq);
        return py::make_tuple(o.k_star, o.psi_nu);
      },
      py::arg("nu"), py::arg("params"));
  m.def(
      "upsilon", [](double eps, const ClassParams& p) { return upsilon(eps, p.omega_seq, p.s_seq, p.b_seq).value; },
      py::arg("eps"), py::arg("params"));
  m.def(
      "oracle_report",
      [](const ClassParams& p, const NoiseLevels& noise, std::size_t J) { return oracle_dict(oracle_report(p, noise, J)); },
      py::arg("params"), py::arg("noise"), py::arg("J"));

  m.def("v_eps", &v_eps, py::arg("eps"));
  m.def(
      "contrast_and_select",
      [](const std::vector<double>& prefix_norms, const std::vector<double>& pen) {
        const auto t = contrast_and_select(prefix_norms, pen);
        return py::make_tuple(t.k_hat, t.contrast, t.penalized);
      },
      py::arg("prefix_norms"), py::arg("pen"));
  m.def(
      "adaptive_estimate",
      [](const ObservationSet& obs, const WeightSequence& omega, double penalty_constant) {
        const auto res = adaptive_estimate(obs, omega, penalty_constant);
        py::dict d;
        d["k_hat"] = res.trace.k_hat;
        d["K_hat"] = res.bounds.hat.K;
        d["coeffs"] = res.selected.coeffs;
        d["pen"] = res.penalty.pen;
        d["penalized"] = res.trace.penalized;
        return d;
      },
      py::arg("obs"), py::arg("omega"), py::arg("penalty_constant") = kDefaultPenaltyConstant);

  m.def(
      "mc_risk",
      [](const ProblemInstance& instance, const NoiseLevels& noise, std::size_t replications, std::uint64_t seed,
         const std::string& mode, double penalty_constant, unsigned workers, bool keep_risks) {
        McSettings cfg{.instance = instance, .noise = noise};
        cfg.replications = replications;
        cfg.seed = seed;
        cfg.mode = parse_estimation_mode(mode);
        cfg.penalty_constant = penalty_constant;
        cfg.workers = workers;
        cfg.keep_risks = keep_risks;
        RiskReport rep;
        {
          py::gil_scoped_release release;
          rep = mc_risk(cfg);
        }
        return risk_dict(rep);
      },
      py::arg("instance"), py::arg("noise"), py::arg("replications") = 200, py::arg("seed") = 0,
      py::arg("mode") = "oracle", py::arg("penalty_constant") = kDefaultPenaltyConstant, py::arg("workers") = 1,
      py::arg("keep_risks") = false);

  m.def(
      "key_lemma_trials",
      [](std::size_t trials, std::uint64_t seed, std::size_t max_K) {
        const auto rep = key_lemma_trials(trials, seed, max_K);
        return py::make_tuple(rep.violations, rep.worst_margin);
      },
      py::arg("trials"), py::arg("seed") = 0, py::arg("max_K") = 50);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "seqinv");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
