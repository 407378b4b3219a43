#pragma once

#include "rockrelax/objectives.hpp"
#include "rockrelax/optimizers.hpp"

#include <functional>
#include <vector>

namespace rockrelax {

/// Outer-loop controls for the alternating z/t descent.
enum class ZSolver { bfgs, lbfgs };
enum class TSolver { lp, projected_gd };
enum class TMetric { l1, L2_quadrature };

struct ADIConfig {
    double t_tol = 1e-5;
    TMetric t_metric = TMetric::l1;
    int max_outer = 50;
    ZSolver z_solver = ZSolver::bfgs;
    TSolver t_solver = TSolver::lp;
};

/// Problem hooks the driver alternates over. The z half-step minimizes
/// objective(., t) through grad_z with the chosen quasi-Newton solver; the
/// t half-step either calls exact_t_step (a subproblem solved to optimality,
/// e.g. the transfer LP) or runs projected gradient descent through grad_t /
/// project_t. Closures typically capture the underlying problem by
/// reference, so it must outlive the driver call.
struct ADIProblem {
    int t_dim = 0;

    std::function<double(const std::vector<double>&, const std::vector<double>&)> objective;
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)>
        grad_z;

    // projected_gd path
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)>
        grad_t;
    Projection project_t;

    // lp path: argmin over feasible t of objective(z, .)
    std::function<std::vector<double>(const std::vector<double>&)> exact_t_step;

    InnerProduct z_ip = InnerProduct::euclidean();
    InnerProduct t_ip = InnerProduct::euclidean();

    double z_gtol = 1e-5;
    int z_max_iter = 500;
    int z_lbfgs_memory = 7;
    double t_inner_tol = 1e-6; // projected-gradient stationarity tolerance
    int t_max_iter = 200;
    LineSearchConfig line_search;
};

enum class ADIStop { tolerance, max_outer, inner_failures };

const char* to_string(ADIStop s);

/// One row per half-step: the objective after the step, the distance between
/// successive t iterates (t phases only), and the inner solver's report.
/// These objective evaluations are bookkeeping, not counted in the report.
struct ADITraceRow {
    int outer = 0;
    char phase = 'z'; // 'z' or 't'
    double objective = 0.0;
    double t_distance = 0.0;
    OptimizerReport inner;
    bool inner_failed = false;
};

struct ADIResult {
    std::vector<double> z;
    std::vector<double> t;
    std::vector<ADITraceRow> trace;
    ADIStop stop = ADIStop::max_outer;
    int outer_iterations = 0;

    bool converged() const { return stop == ADIStop::tolerance; }
};

/// Alternate z and t half-steps from t = 0 until successive t iterates are
/// closer than cfg.t_tol in the chosen metric (l1 or the t_ip-weighted L2
/// norm), the outer cap is hit, or two consecutive inner half-steps end in
/// line-search failure. z warm-starts from the previous outer iterate.
ADIResult run_adi(const ADIProblem& prob, std::vector<double> z0, const ADIConfig& cfg);

/// Hooks for the sample-relaxation problem: quasi-Newton in z against the
/// trapezoid metric, exact transfer LP in t. Captures dist and ocfg by
/// reference.
ADIProblem make_adi_problem_ex2(const DiscreteDistribution1D& dist, const RockafellianConfig& ocfg,
                                bool stringent_bounds);

/// Hooks for the disk-window problem: quasi-Newton in z against the mass
/// metric, projected gradient descent in t over the window box. Captures
/// prob by reference.
ADIProblem make_adi_problem_ex3(const Ex3Problem& prob);

} // namespace rockrelax
