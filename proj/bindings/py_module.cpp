// Python surface: experiment configs/runs, the theta sweep, the schedule
// study, and the scalar toy problem. Field vectors cross as plain lists.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rockrelax/experiments.hpp"
#include "rockrelax/motivating.hpp"

namespace py = pybind11;
using namespace rockrelax;

PYBIND11_MODULE(rockrelax, m) {
    m.doc() = "Rockafellian relaxation of corrupted PDE-constrained programs";

    py::enum_<ExampleKind>(m, "ExampleKind")
        .value("motivating", ExampleKind::motivating)
        .value("ex1", ExampleKind::ex1)
        .value("ex2", ExampleKind::ex2)
        .value("ex3", ExampleKind::ex3);

    py::enum_<StopReason>(m, "StopReason")
        .value("tolerance", StopReason::tolerance)
        .value("max_iter", StopReason::max_iter)
        .value("line_search_failure", StopReason::line_search_failure);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("example", &ExperimentConfig::example)
        .def_readwrite("corruption", &ExperimentConfig::corruption)
        .def_readwrite("theta", &ExperimentConfig::theta)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("grid_cells", &ExperimentConfig::grid_cells)
        .def_readwrite("mesh_dof", &ExperimentConfig::mesh_dof)
        .def_readwrite("n_xi", &ExperimentConfig::n_xi)
        .def_readwrite("n_samples", &ExperimentConfig::n_samples)
        .def_readwrite("kkl_terms", &ExperimentConfig::kkl_terms)
        .def_readwrite("sigma", &ExperimentConfig::sigma)
        .def_readwrite("alpha", &ExperimentConfig::alpha)
        .def_readwrite("plain_tol", &ExperimentConfig::plain_tol)
        .def_readwrite("plain_max_iter", &ExperimentConfig::plain_max_iter)
        .def_readwrite("joint_tol", &ExperimentConfig::joint_tol)
        .def_readwrite("joint_max_iter", &ExperimentConfig::joint_max_iter)
        .def_readwrite("z_gtol", &ExperimentConfig::z_gtol)
        .def_readwrite("z_max_iter", &ExperimentConfig::z_max_iter)
        .def_readwrite("t_tol", &ExperimentConfig::t_tol)
        .def_readwrite("max_outer", &ExperimentConfig::max_outer)
        .def_readwrite("t_inner_tol", &ExperimentConfig::t_inner_tol)
        .def_readwrite("t_max_iter", &ExperimentConfig::t_max_iter)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def("validate", &ExperimentConfig::validate);

    m.def("make_default_config", &make_default_config, py::arg("example"),
          "per-example defaults used by the command-line tool");
    m.def("parse_example", &parse_example, py::arg("name"));

    py::class_<DeletionCount>(m, "DeletionCount")
        .def_readonly("count", &DeletionCount::count)
        .def_readonly("total", &DeletionCount::total);

    py::class_<OptimizerReport>(m, "OptimizerReport")
        .def_readonly("iterations", &OptimizerReport::iterations)
        .def_readonly("objective_evals", &OptimizerReport::objective_evals)
        .def_readonly("gradient_evals", &OptimizerReport::gradient_evals)
        .def_readonly("final_value", &OptimizerReport::final_value)
        .def_readonly("termination_reason", &OptimizerReport::termination_reason);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("e_rel_rock", &MetricsReport::e_rel_rock)
        .def_readonly("e_rel_corrupted", &MetricsReport::e_rel_corrupted)
        .def_readonly("e_ratio", &MetricsReport::e_ratio)
        .def_readonly("v_ratio", &MetricsReport::v_ratio)
        .def_readonly("corrupted_deleted", &MetricsReport::corrupted_deleted)
        .def_readonly("clean_deleted", &MetricsReport::clean_deleted)
        .def_readonly("true_report", &MetricsReport::true_report)
        .def_readonly("corrupted_report", &MetricsReport::corrupted_report)
        .def_readonly("rock_outer_iterations", &MetricsReport::rock_outer_iterations)
        .def_readonly("rock_inner_iterations", &MetricsReport::rock_inner_iterations)
        .def_readonly("rock_inner_evals", &MetricsReport::rock_inner_evals)
        .def_readonly("rock_stop", &MetricsReport::rock_stop)
        .def_readonly("rock_converged", &MetricsReport::rock_converged);

    py::class_<ADITraceRow>(m, "ADITraceRow")
        .def_readonly("outer", &ADITraceRow::outer)
        .def_readonly("phase", &ADITraceRow::phase)
        .def_readonly("objective", &ADITraceRow::objective)
        .def_readonly("t_distance", &ADITraceRow::t_distance)
        .def_readonly("inner", &ADITraceRow::inner)
        .def_readonly("inner_failed", &ADITraceRow::inner_failed);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("config", &ExperimentResult::config)
        .def_readonly("xs", &ExperimentResult::xs)
        .def_readonly("ys", &ExperimentResult::ys)
        .def_readonly("z_true", &ExperimentResult::z_true)
        .def_readonly("z_corrupted", &ExperimentResult::z_corrupted)
        .def_readonly("z_rock", &ExperimentResult::z_rock)
        .def_readonly("eu_true", &ExperimentResult::eu_true)
        .def_readonly("eu_corrupted", &ExperimentResult::eu_corrupted)
        .def_readonly("eu_rock", &ExperimentResult::eu_rock)
        .def_readonly("p_or_xi", &ExperimentResult::p_or_xi)
        .def_readonly("t_star", &ExperimentResult::t_star)
        .def_readonly("deleted", &ExperimentResult::deleted)
        .def_readonly("trace", &ExperimentResult::trace)
        .def_readonly("linf_rock_vs_true", &ExperimentResult::linf_rock_vs_true)
        .def_readonly("metrics", &ExperimentResult::metrics);

    m.def("run_example", &run_example, py::arg("config"),
          "one experiment: true, corrupted and relaxed solves plus metrics "
          "(writes CSVs when config.output_dir is set)",
          py::call_guard<py::gil_scoped_release>());
    m.def("theta_sweep", &theta_sweep, py::arg("config"), py::arg("thetas"),
          "one run per theta, sharing the reference and corrupted solves",
          py::call_guard<py::gil_scoped_release>());

    py::class_<GammaScheduleEntry>(m, "GammaScheduleEntry")
        .def(py::init([](double eps, double theta) {
                 GammaScheduleEntry e;
                 e.eps = eps;
                 e.theta = theta;
                 return e;
             }),
             py::arg("eps"), py::arg("theta"))
        .def_readwrite("eps", &GammaScheduleEntry::eps)
        .def_readwrite("theta", &GammaScheduleEntry::theta);

    py::class_<GammaRow>(m, "GammaRow")
        .def_readonly("k", &GammaRow::k)
        .def_readonly("eps", &GammaRow::eps)
        .def_readonly("theta", &GammaRow::theta)
        .def_readonly("distance", &GammaRow::distance)
        .def_readonly("t2_star", &GammaRow::t2_star);

    m.def("default_gamma_schedule", &default_gamma_schedule, py::arg("steps") = 6,
          "eps_k = 2^-k with theta_k = eps_k^-1/2");
    m.def("gamma_schedule_study", &gamma_schedule_study, py::arg("config"), py::arg("schedule"),
          "distance to the reference control along a vanishing-corruption schedule",
          py::call_guard<py::gil_scoped_release>());

    m.def("variance_ratio", &variance_ratio, py::arg("corrupted_norms"), py::arg("rock_norms"),
          py::arg("weights"), "weighted variance of the first set over the second");

    py::class_<MotivatingInstance>(m, "MotivatingInstance")
        .def(py::init<>())
        .def_readwrite("eps", &MotivatingInstance::eps)
        .def_readwrite("theta", &MotivatingInstance::theta);

    py::class_<MotivatingSolution>(m, "MotivatingSolution")
        .def_readonly("x", &MotivatingSolution::x)
        .def_readonly("t", &MotivatingSolution::t);

    m.def("phi_uncorrupted", &phi_uncorrupted, py::arg("x"));
    m.def("phi_corrupted", &phi_corrupted, py::arg("x"), py::arg("eps"));
    m.def("motivating_objective", &motivating_objective, py::arg("instance"), py::arg("x"),
          py::arg("t2"));
    m.def("solve_rockafellian_closed_form", &solve_rockafellian_closed_form, py::arg("instance"));
    m.def("solve_rockafellian_numeric", &solve_rockafellian_numeric, py::arg("instance"),
          py::arg("grid_n"));
}
