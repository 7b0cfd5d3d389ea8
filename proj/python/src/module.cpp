#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "vacq/closedform.hpp"
#include "vacq/kernel.hpp"
#include "vacq/model.hpp"
#include "vacq/montecarlo.hpp"
#include "vacq/recursion.hpp"
#include "vacq/solver.hpp"

namespace py = pybind11;
using namespace vacq;

namespace {

Discipline parse_discipline(const std::string& s) {
    if (s == "reneging") return Discipline::reneging;
    if (s == "balking") return Discipline::balking;
    throw SpecError("discipline must be 'reneging' or 'balking', got '" + s + "'");
}

std::string discipline_name(Discipline d) {
    return d == Discipline::reneging ? "reneging" : "balking";
}

VacationIndexing parse_indexing(const std::string& s) {
    if (s == "fresh_draw") return VacationIndexing::fresh_draw;
    if (s == "per_service") return VacationIndexing::per_service;
    throw SpecError("indexing must be 'fresh_draw' or 'per_service', got '" + s + "'");
}

QueueConfig make_config(double T, double K, const std::string& service,
                        const std::string& vacation, const std::string& discipline) {
    QueueConfig c;
    c.T = T;
    c.K = K;
    c.service = DistributionSpec::parse(service);
    c.vacation = DistributionSpec::parse(vacation);
    c.discipline = parse_discipline(discipline);
    c.validate();
    return c;
}

}  // namespace

PYBIND11_MODULE(_vacq, m) {
    m.doc() = "waiting-time laws for a periodic-arrival queue with server "
              "vacations and a deadline";

    py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
    py::register_exception<UnstableError>(m, "UnstableError", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<QueueConfig>(m, "QueueConfig")
        .def(py::init(&make_config), py::arg("T"), py::arg("K"), py::arg("service"),
             py::arg("vacation"), py::arg("discipline") = "reneging",
             "service/vacation use the CLI spec strings: det:<value>, exp:<rate>, "
             "tab:<path.csv>")
        .def_readonly("T", &QueueConfig::T)
        .def_readonly("K", &QueueConfig::K)
        .def_property_readonly(
            "discipline", [](const QueueConfig& c) { return discipline_name(c.discipline); })
        .def("__repr__", [](const QueueConfig& c) {
            return "QueueConfig(T=" + std::to_string(c.T) + ", K=" + std::to_string(c.K) +
                   ", discipline='" + discipline_name(c.discipline) + "')";
        });

    py::class_<MixedDistribution>(m, "MixedDistribution")
        .def_readonly("atom0", &MixedDistribution::atom0)
        .def_readonly("x_max", &MixedDistribution::x_max)
        .def_readonly("density", &MixedDistribution::density)
        .def_readonly("cdf", &MixedDistribution::cdf)
        .def_readonly("boundary_mass", &MixedDistribution::boundary_mass)
        .def_property_readonly("boundary_kind",
                               [](const MixedDistribution& d) {
                                   return d.boundary_kind == BoundaryKind::deadline_atom
                                              ? "deadline_atom"
                                              : "truncation_tail";
                               })
        .def("h", &MixedDistribution::h)
        .def("cdf_at", &MixedDistribution::cdf_at, py::arg("x"))
        .def("normalization_error", &MixedDistribution::normalization_error)
        .def("validate", &MixedDistribution::validate, py::arg("tol") = 1e-8);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("se", &Estimate::se)
        .def("__repr__", [](const Estimate& e) {
            return "Estimate(value=" + std::to_string(e.value) + ", se=" +
                   std::to_string(e.se) + ")";
        });

    py::class_<SimulationSummary>(m, "SimulationSummary")
        .def_readonly("n_customers", &SimulationSummary::n_customers)
        .def_readonly("n_replications", &SimulationSummary::n_replications)
        .def_readonly("burn_in", &SimulationSummary::burn_in)
        .def_readonly("W0_hat", &SimulationSummary::W0_hat)
        .def_readonly("BK_hat", &SimulationSummary::BK_hat)
        .def_readonly("mean_wait", &SimulationSummary::mean_wait)
        .def_readonly("empirical", &SimulationSummary::empirical)
        .def_readonly("seed", &SimulationSummary::seed)
        .def_readonly("stable", &SimulationSummary::stable);

    py::class_<SolverResult>(m, "SolverResult")
        .def_readonly("dist", &SolverResult::dist)
        .def_readonly("BK", &SolverResult::BK)
        .def_readonly("iterations", &SolverResult::iterations)
        .def_readonly("residual", &SolverResult::residual)
        .def_readonly("converged", &SolverResult::converged)
        .def_readonly("residual_history", &SolverResult::residual_history);

    py::class_<TailEstimate>(m, "TailEstimate")
        .def_readonly("probability", &TailEstimate::probability)
        .def_readonly("se", &TailEstimate::se)
        .def_readonly("n_paths", &TailEstimate::n_paths);

    py::class_<KsResult>(m, "KsResult")
        .def_readonly("statistic", &KsResult::statistic)
        .def_readonly("p_value", &KsResult::p_value);

    py::class_<StabilityResult>(m, "StabilityResult")
        .def_readonly("probability", &StabilityResult::probability)
        .def_readonly("stable", &StabilityResult::stable);

    py::class_<PathRecord>(m, "PathRecord")
        .def_readonly("w", &PathRecord::w)
        .def_readonly("lost", &PathRecord::lost)
        .def("__repr__", [](const PathRecord& r) {
            return "PathRecord(w=" + std::to_string(r.w) + ", lost=" +
                   (r.lost ? std::string("True") : std::string("False")) + ")";
        });

    py::class_<ClosedFormDDet>(m, "ClosedFormDDet")
        .def_readonly("lambda_", &ClosedFormDDet::lambda)
        .def_readonly("sigma", &ClosedFormDDet::sigma)
        .def_readonly("T", &ClosedFormDDet::T)
        .def_readonly("K", &ClosedFormDDet::K)
        .def_readonly("alpha_lambda", &ClosedFormDDet::alpha_lambda)
        .def_readonly("amplitude", &ClosedFormDDet::amplitude)
        .def_readonly("rate", &ClosedFormDDet::rate)
        .def_readonly("I", &ClosedFormDDet::I)
        .def_readonly("bk_coeff", &ClosedFormDDet::bk_coeff)
        .def_readonly("bk_alt", &ClosedFormDDet::bk_alt)
        .def_readonly("W0", &ClosedFormDDet::W0)
        .def_readonly("BK", &ClosedFormDDet::BK)
        .def("density", &ClosedFormDDet::density, py::arg("x"))
        .def("cdf", &ClosedFormDDet::cdf, py::arg("x"));

    py::class_<ClosedFormDM>(m, "ClosedFormDM")
        .def_readonly("lambda_", &ClosedFormDM::lambda)
        .def_readonly("mu", &ClosedFormDM::mu)
        .def_readonly("T", &ClosedFormDM::T)
        .def_readonly("K", &ClosedFormDM::K)
        .def_readonly("alpha_lambda", &ClosedFormDM::alpha_lambda)
        .def_readonly("alpha_mu", &ClosedFormDM::alpha_mu)
        .def_readonly("A", &ClosedFormDM::A)
        .def_readonly("B", &ClosedFormDM::B)
        .def_readonly("gamma1", &ClosedFormDM::gamma1)
        .def_readonly("gamma2", &ClosedFormDM::gamma2)
        .def_readonly("C1", &ClosedFormDM::C1)
        .def_readonly("C2", &ClosedFormDM::C2)
        .def_readonly("I", &ClosedFormDM::I)
        .def_readonly("bk_coeff", &ClosedFormDM::bk_coeff)
        .def_readonly("W0", &ClosedFormDM::W0)
        .def_readonly("BK", &ClosedFormDM::BK)
        .def("density", &ClosedFormDM::density, py::arg("x"))
        .def("cdf", &ClosedFormDM::cdf, py::arg("x"));

    py::class_<KernelParams>(m, "KernelParams")
        .def_static("make", &KernelParams::make, py::arg("config"),
                    py::arg("truncation_eps") = 1e-12);

    m.def("check_stability", &check_stability, py::arg("config"));
    m.def("conv_cdf", &conv_cdf, py::arg("config"), py::arg("x"),
          "CDF of one service plus one vacation at x");
    m.def("kernel_sum", &kernel_sum, py::arg("x"), py::arg("w"), py::arg("params"),
          "transition CDF of the served chain from wait w to at most x");
    m.def("loss_sum", &loss_sum, py::arg("w"), py::arg("params"),
          "expected consecutive losses after a served customer at wait w");

    m.def(
        "run_path",
        [](const QueueConfig& c, std::uint64_t n, std::uint64_t seed,
           const std::string& indexing) {
            return run_path(c, n, seed, parse_indexing(indexing));
        },
        py::arg("config"), py::arg("n_customers"), py::arg("seed"),
        py::arg("indexing") = "fresh_draw", py::call_guard<py::gil_scoped_release>(),
        "first n path records, position 0 first (always w=0)");

    m.def(
        "estimate_stationary",
        [](const QueueConfig& c, std::uint64_t n, std::uint64_t burn, std::uint32_t reps,
           std::uint64_t seed, std::size_t grid, unsigned threads,
           const std::string& indexing) {
            return estimate_stationary(c, n, burn, reps, seed, grid, threads,
                                       parse_indexing(indexing));
        },
        py::arg("config"), py::arg("n_customers"), py::arg("burn_in"),
        py::arg("replications"), py::arg("seed"), py::arg("grid_size") = 512,
        py::arg("threads") = 0, py::arg("indexing") = "fresh_draw",
        py::call_guard<py::gil_scoped_release>());

    m.def("estimate_transient_tail", &estimate_transient_tail, py::arg("config"),
          py::arg("n"), py::arg("x"), py::arg("replications"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>(),
          "Monte Carlo estimate of P(w_n > x) from independent path prefixes");

    m.def(
        "stationary_samples",
        [](const QueueConfig& c, std::uint64_t n, std::uint64_t burn, std::uint64_t seed,
           std::uint64_t stride, const std::string& indexing) {
            return stationary_samples(c, n, burn, seed, stride, parse_indexing(indexing));
        },
        py::arg("config"), py::arg("n_samples"), py::arg("burn_in"), py::arg("seed"),
        py::arg("stride") = 10, py::arg("indexing") = "fresh_draw",
        py::call_guard<py::gil_scoped_release>());

    m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"),
          py::call_guard<py::gil_scoped_release>());

    m.def("solve_reneging_stationary", &solve_reneging_stationary, py::arg("config"),
          py::arg("grid_size") = 512, py::arg("tol") = 1e-10, py::arg("max_iter") = 20000,
          py::call_guard<py::gil_scoped_release>());
    m.def("solve_balking_stationary", &solve_balking_stationary, py::arg("config"),
          py::arg("grid_size") = 512, py::arg("tol") = 1e-10, py::arg("max_iter") = 20000,
          py::call_guard<py::gil_scoped_release>());
    m.def("iterate_transient", &iterate_transient, py::arg("config"), py::arg("n_steps"),
          py::arg("grid_size") = 512, py::call_guard<py::gil_scoped_release>(),
          "laws [W_1 .. W_n] of the wait found by each arrival, empty start");

    m.def("ddet_exp_solution",
          py::overload_cast<double, double, double, double>(&ddet_exp_solution),
          py::arg("lambda_"), py::arg("sigma"), py::arg("T"), py::arg("K"));
    m.def("ddet_exp_solution", py::overload_cast<const QueueConfig&>(&ddet_exp_solution),
          py::arg("config"));
    m.def("dm_exp_solution",
          py::overload_cast<double, double, double, double>(&dm_exp_solution),
          py::arg("lambda_"), py::arg("mu"), py::arg("T"), py::arg("K"));
    m.def("dm_exp_solution", py::overload_cast<const QueueConfig&>(&dm_exp_solution),
          py::arg("config"));
    m.def("volterra_resolvent_density", &volterra_resolvent_density, py::arg("cf"),
          py::arg("x"));
    m.def("dm_transform_denominator", &dm_transform_denominator, py::arg("theta"),
          py::arg("lambda_"), py::arg("mu"), py::arg("T"));
    m.def("balking_transient_tail",
          py::overload_cast<const QueueConfig&, std::uint64_t, double>(
              &balking_transient_tail),
          py::arg("config"), py::arg("n"), py::arg("x"),
          "candidate formula for P(w_{n+1} > x); exact only at n = 0");
}
