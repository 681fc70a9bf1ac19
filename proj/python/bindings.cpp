#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "eeopt/app/config.hpp"
#include "eeopt/app/runner.hpp"
#include "eeopt/ergodic.hpp"
#include "eeopt/error.hpp"
#include "eeopt/mmse.hpp"
#include "eeopt/nested.hpp"
#include "eeopt/numerics.hpp"
#include "eeopt/powermodel.hpp"
#include "eeopt/waterfill.hpp"

namespace py = pybind11;
using namespace eeopt;

namespace {

waterfill::ParallelChannel channel_of(std::vector<double> cnrs, double p_max) {
  return {std::move(cnrs), p_max};
}

mmse::MercuryChannel mercury_of(const std::vector<std::string>& labels, std::vector<double> cnrs,
                                double rho_max, int points) {
  mmse::MercuryChannel ch;
  for (const auto& label : labels) {
    ch.tables.push_back(mmse::build_table(mmse::Constellation::parse(label), rho_max, points));
  }
  ch.cnrs = std::move(cnrs);
  return ch;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-efficient power allocation: water-filling, ergodic and MMSE-based solvers.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<app::ConfigError>(m, "ConfigError", base.ptr());

  m.def("lambert_w0", &numerics::lambert_w0, py::arg("x"));
  m.def("exp_int", &numerics::exp_int, py::arg("n"), py::arg("x"));

  py::class_<waterfill::Allocation>(m, "Allocation")
      .def_readonly("powers", &waterfill::Allocation::powers)
      .def_readonly("rates", &waterfill::Allocation::rates)
      .def_readonly("sum_power", &waterfill::Allocation::sum_power)
      .def_readonly("sum_rate", &waterfill::Allocation::sum_rate)
      .def("energy_efficiency", &waterfill::Allocation::energy_efficiency, py::arg("mu"));

  py::class_<waterfill::StaticSolution>(m, "StaticSolution")
      .def_readonly("allocation", &waterfill::StaticSolution::allocation)
      .def_readonly("lambda_", &waterfill::StaticSolution::lambda)
      .def_readonly("ee", &waterfill::StaticSolution::ee)
      .def_property_readonly("iterations", [](const waterfill::StaticSolution& s) { return s.trace.iterations; })
      .def_property_readonly("status", [](const waterfill::StaticSolution& s) {
        return std::string(fracprog::to_string(s.trace.status));
      });

  m.def(
      "waterfill_allocate",
      [](std::vector<double> cnrs, double lambda, double p_max) {
        return waterfill::waterfill_allocate(channel_of(std::move(cnrs), p_max), lambda);
      },
      py::arg("cnrs"), py::arg("lam"), py::arg("p_max") = numerics::kInf);

  m.def(
      "solve_static",
      [](std::vector<double> cnrs, double mu, double p_max, std::optional<double> sum_power,
         std::optional<double> min_rate, double tol) {
        return waterfill::solve_static({channel_of(std::move(cnrs), p_max), mu, sum_power, min_rate}, tol);
      },
      py::arg("cnrs"), py::arg("mu"), py::arg("p_max") = numerics::kInf, py::arg("sum_power") = py::none(),
      py::arg("min_rate") = py::none(), py::arg("tol") = 1e-10);

  m.def(
      "flat_fading_closed_form",
      [](double cnr, double mu) {
        const auto cf = waterfill::flat_fading_closed_form(cnr, mu);
        return py::make_tuple(cf.lambda, cf.power);
      },
      py::arg("cnr"), py::arg("mu"));

  py::class_<ergodic::ErgodicSolution>(m, "ErgodicSolution")
      .def_readonly("lambda_", &ergodic::ErgodicSolution::lambda)
      .def_readonly("ee", &ergodic::ErgodicSolution::ee)
      .def_readonly("avg_rate", &ergodic::ErgodicSolution::avg_rate)
      .def_readonly("avg_power", &ergodic::ErgodicSolution::avg_power)
      .def_readonly("idle_probability", &ergodic::ErgodicSolution::idle_probability)
      .def_readonly("iterations", &ergodic::ErgodicSolution::iterations)
      .def_readonly("ee_std_error", &ergodic::ErgodicSolution::ee_std_error)
      .def_readonly("low_sample_warning", &ergodic::ErgodicSolution::low_sample_warning)
      .def_property_readonly("status", [](const ergodic::ErgodicSolution& s) {
        return std::string(fracprog::to_string(s.status));
      });

  m.def("eval_F_rayleigh", &ergodic::eval_F_rayleigh, py::arg("mean_cnr"), py::arg("mu"), py::arg("lam"));
  m.def(
      "solve_ergodic_rayleigh",
      [](double mean_cnr, double mu, std::optional<double> avg_power_max,
         std::optional<double> avg_rate_min, double tol) {
        return ergodic::solve_ergodic(
            {ergodic::FadingModel::rayleigh(mean_cnr), mu, avg_power_max, avg_rate_min}, tol);
      },
      py::arg("mean_cnr"), py::arg("mu"), py::arg("avg_power_max") = py::none(),
      py::arg("avg_rate_min") = py::none(), py::arg("tol") = 1e-10);
  m.def(
      "solve_parallel_fading",
      [](const std::vector<double>& mean_cnrs, double mu, std::size_t samples, std::uint64_t seed) {
        return ergodic::solve_parallel_fading(ergodic::rayleigh_scenario(mean_cnrs, samples, seed), mu);
      },
      py::arg("mean_cnrs"), py::arg("mu"), py::arg("samples") = 100000, py::arg("seed") = 1);
  m.def(
      "solve_mimo",
      [](int n_t, int n_r, double gain, double mu, std::size_t samples, std::uint64_t seed) {
        return ergodic::solve_parallel_fading(ergodic::mimo_scenario(n_t, n_r, gain, samples, seed), mu);
      },
      py::arg("n_t"), py::arg("n_r"), py::arg("gain"), py::arg("mu"), py::arg("samples") = 100000,
      py::arg("seed") = 1);

  m.def(
      "mmse_of", [](const std::string& label, double rho) { return mmse::mmse_of(mmse::Constellation::parse(label), rho); },
      py::arg("constellation"), py::arg("rho"));

  py::class_<mmse::MmseTable>(m, "MmseTable")
      .def_readonly("label", &mmse::MmseTable::label)
      .def_readonly("saturated", &mmse::MmseTable::saturated)
      .def_readonly("rho", &mmse::MmseTable::rho)
      .def_readonly("mmse", &mmse::MmseTable::mmse)
      .def_readonly("rate", &mmse::MmseTable::rate)
      .def("mmse_at", &mmse::MmseTable::mmse_at, py::arg("rho"))
      .def("rate_at", &mmse::MmseTable::rate_at, py::arg("rho"))
      .def("inverse", &mmse::MmseTable::inverse, py::arg("zeta"))
      .def("dumps", [](const mmse::MmseTable& t) {
        std::ostringstream os;
        mmse::save_table(t, os);
        return os.str();
      });
  m.def(
      "build_table",
      [](const std::string& label, double rho_max, int points) {
        return mmse::build_table(mmse::Constellation::parse(label), rho_max, points);
      },
      py::arg("constellation"), py::arg("rho_max") = mmse::kDefaultRhoMax,
      py::arg("points") = mmse::kDefaultTablePoints);

  py::class_<mmse::MmseSolution>(m, "MmseSolution")
      .def_readonly("lambda_", &mmse::MmseSolution::lambda)
      .def_readonly("ee", &mmse::MmseSolution::ee)
      .def_property_readonly("powers", [](const mmse::MmseSolution& s) { return s.allocation.powers; })
      .def_property_readonly("sum_power", [](const mmse::MmseSolution& s) { return s.allocation.sum_power; })
      .def_property_readonly("sum_rate", [](const mmse::MmseSolution& s) { return s.allocation.sum_rate; });
  m.def(
      "solve_mmse_ee",
      [](const std::vector<std::string>& constellations, std::vector<double> cnrs, double mu,
         double tol, double rho_max, int points) {
        return mmse::solve_mmse_ee(mercury_of(constellations, std::move(cnrs), rho_max, points), mu, tol);
      },
      py::arg("constellations"), py::arg("cnrs"), py::arg("mu"), py::arg("tol") = 1e-10,
      py::arg("rho_max") = mmse::kDefaultRhoMax, py::arg("points") = mmse::kDefaultTablePoints);

  py::class_<nested::NestedSolution>(m, "NestedSolution")
      .def_readonly("t", &nested::NestedSolution::t)
      .def_readonly("ee", &nested::NestedSolution::ee)
      .def_readonly("sum_power", &nested::NestedSolution::sum_power)
      .def_readonly("iterations", &nested::NestedSolution::iterations)
      .def_property_readonly("powers", [](const nested::NestedSolution& s) { return s.allocation.powers; });
  m.def(
      "solve_nested",
      [](std::vector<double> cnrs, double mu, double p_max, double tol) {
        return nested::solve_nested(nested::WaterfillOracle(channel_of(std::move(cnrs), p_max)), mu, tol);
      },
      py::arg("cnrs"), py::arg("mu"), py::arg("p_max") = numerics::kInf, py::arg("tol") = 1e-12);

  m.def(
      "generic_mu",
      [](double bandwidth, double eta_pa, double p_sta, int n_a, double p_c, double eta_ps, double eta_c) {
        powermodel::GenericBsModel g;
        g.bandwidth = bandwidth;
        g.eta_pa = eta_pa;
        g.p_sta = p_sta;
        g.n_a = n_a;
        g.p_c = p_c;
        g.eta_ps = eta_ps;
        g.eta_c = eta_c;
        const auto ms = powermodel::to_mu_scale(g);
        return py::make_tuple(ms.mu, ms.conversion);
      },
      py::arg("bandwidth"), py::arg("eta_pa"), py::arg("p_sta"), py::arg("n_a") = 1, py::arg("p_c") = 0.0,
      py::arg("eta_ps") = 1.0, py::arg("eta_c") = 0.0,
      "Circuit power per Hz and the bit/J conversion factor of the generic base-station model.");

  m.def(
      "run_config",
      [](const std::string& text) {
        const auto result = app::run_scenario(app::parse_config(text));
        std::ostringstream os;
        app::write_csv(os, result.rows);
        return os.str();
      },
      py::arg("text"), "Run a JSON scenario and return the result CSV.");
  m.def(
      "tradeoff_config",
      [](const std::string& text) {
        std::ostringstream os;
        app::write_tradeoff_csv(os, app::tradeoff_curve(app::parse_config(text)));
        return os.str();
      },
      py::arg("text"));
  m.def(
      "validate_config", [](const std::string& text) { app::parse_config(text); }, py::arg("text"));
}
