#include "gkde/cli.hpp"
#include "gkde/densities.hpp"
#include "gkde/errors.hpp"
#include "gkde/estimator.hpp"
#include "gkde/experiments.hpp"
#include "gkde/kernel.hpp"
#include "gkde/risk.hpp"
#include "gkde/rng.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace gkde;

namespace {

TestDensity density_from(const std::string& spec)
{
  return TestDensity::from_json(nlohmann::json::parse(spec));
}

py::dict report_dict(const RiskReport& r)
{
  py::dict d;
  d["p"] = r.p;
  d["n"] = r.n;
  d["b"] = r.b;
  d["risk_p"] = r.risk_p;
  d["risk_norm"] = r.risk_norm();
  d["std_error"] = r.std_error;
  d["bias_term"] = r.bias_term;
  d["stoch_term"] = r.stoch_term;
  d["replications"] = r.replications;
  d["tail_bound"] = r.tail_bound;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Gamma kernel density estimation core";
  m.attr("__version__") = cli::version();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<BandwidthTooLarge>(m, "BandwidthTooLarge", domain.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<QuadratureNonConvergence>(m, "QuadratureNonConvergence",
                                                   numerical.ptr());
  py::register_exception<NegativeMass>(m, "NegativeMass", numerical.ptr());
  py::register_exception<EnvelopeViolation>(m, "EnvelopeViolation", numerical.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", numerical.ptr());

  m.def(
    "kernel_pdf", [](double x, double b, double t) { return kernel_pdf(KernelPoint(x, b), t); },
    py::arg("x"), py::arg("b"), py::arg("t"));

  m.def(
    "estimate",
    [](const std::vector<double>& data, double b, const std::vector<double>& grid) {
      return estimate(data, EstimatorConfig(b, grid));
    },
    py::arg("data"), py::arg("b"), py::arg("grid"));

  m.def("bandwidth_rule", &bandwidth_rule, py::arg("n"), py::arg("beta"), py::arg("c") = 1.0);

  m.def(
    "density_pdf",
    [](const std::string& spec, const std::vector<double>& x) {
      const TestDensity d = density_from(spec);
      std::vector<double> out;
      out.reserve(x.size());
      for (double v : x)
        out.push_back(d.pdf(v));
      return out;
    },
    py::arg("spec"), py::arg("x"));

  m.def(
    "sample",
    [](const std::string& spec, std::size_t n, std::uint64_t seed) {
      Rng rng = make_rng(seed, { 0 });
      return sample(density_from(spec), n, rng);
    },
    py::arg("spec"), py::arg("n"), py::arg("seed") = 42);

  m.def(
    "mc_risk",
    [](const std::string& spec, std::size_t n, double b, double p, std::size_t reps,
       std::uint64_t seed) {
      McOptions opts;
      opts.seed = seed;
      RiskReport r;
      {
        py::gil_scoped_release release;
        r = mc_risk(density_from(spec), n, b, p, reps, opts);
      }
      return report_dict(r);
    },
    py::arg("spec"), py::arg("n"), py::arg("b"), py::arg("p"), py::arg("reps"),
    py::arg("seed") = 42);

  m.def(
    "fit_loglog",
    [](const std::vector<double>& x, const std::vector<double>& y, double theoretical) {
      const RateFit f = fit_loglog(x, y, theoretical);
      py::dict d;
      d["slope"] = f.slope;
      d["intercept"] = f.intercept;
      d["r_squared"] = f.r_squared;
      d["theoretical"] = f.theoretical;
      return d;
    },
    py::arg("x"), py::arg("y"), py::arg("theoretical") = 0.0);

  m.def("minimax_exponent", &minimax_exponent, py::arg("beta"));
  m.def("oracle_exponent", &oracle_exponent, py::arg("beta"), py::arg("p"));
  m.def(
    "predict_regime", [](double p, double beta) { return to_string(predict_regime(p, beta)); },
    py::arg("p"), py::arg("beta"));

  m.def("commands", &cli::commands);

  // Runs a CLI command from a JSON config and returns (csv, results JSON).
  m.def(
    "run",
    [](const std::string& config) {
      const cli::RunConfig cfg = cli::config_from_json(nlohmann::json::parse(config));
      cli::validate(cfg);
      std::ostringstream csv;
      nlohmann::json results;
      {
        py::gil_scoped_release release;
        results = cli::execute(cfg, csv);
      }
      return py::make_tuple(csv.str(), results.dump());
    },
    py::arg("config"));
}
