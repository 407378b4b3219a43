#pragma once

#include <functional>
#include <vector>

namespace rockrelax {

// Inner product the optimizers measure everything in. For nodal fields this is the
// discrete L2 product (diagonal trapezoid weights in 1D, mass matrix in 2D), so
// iteration counts stay mesh-independent. `apply` maps v to W v and is only needed
// by the dense BFGS update; `dot` is used everywhere.
struct InnerProduct {
    std::function<double(const std::vector<double>&, const std::vector<double>&)> dot;
    std::function<std::vector<double>(const std::vector<double>&)> apply;

    double norm(const std::vector<double>& v) const;

    static InnerProduct euclidean();
    static InnerProduct diagonal(std::vector<double> weights);
};

struct LineSearchConfig {
    double armijo_c1 = 1e-4;
    double backtrack_factor = 0.5;
    // Curvature constant for the quasi-Newton history rule: a step's (s, y) pair is
    // kept only when <g_new, d> >= c2 <g, d>, the second Wolfe inequality.
    double wolfe_c2 = 0.9;
    int max_backtracks = 50;
};

enum class StopReason { tolerance, max_iter, line_search_failure };

struct OptimizerReport {
    int iterations = 0;
    long long objective_evals = 0;
    long long gradient_evals = 0;
    double final_value = 0.0;
    StopReason termination_reason = StopReason::tolerance;
};

struct OptimResult {
    std::vector<double> x;
    OptimizerReport report;
};

using Objective = std::function<double(const std::vector<double>&)>;
using Gradient = std::function<std::vector<double>(const std::vector<double>&)>;
using Projection = std::function<std::vector<double>(const std::vector<double>&)>;

// Which stationarity test projected descent uses.
//   step_norm:  stop when ||x - P(x - g)|| < tol.
//   control_gradient_product:  stop when |<x, g>| < tol, the product taken over
//   the components the projection leaves free (a coordinate clipped at an
//   active bound keeps a permanent gradient and is excluded; with an identity
//   projection this is plain <x, g>). Checked after the first accepted step —
//   an all-zero start would otherwise satisfy it vacuously; an exactly zero
//   gradient stops immediately.
enum class ProjectedStop { step_norm, control_gradient_product };

// Gradient descent with backtracking Armijo line search, stopping on the
// control-gradient product |<x, g>| < tol.
OptimResult armijo_gd(const Objective& f, const Gradient& grad, std::vector<double> x0,
                      double tol, const LineSearchConfig& ls, int max_iter,
                      const InnerProduct& ip);

// Projected gradient descent: trial points are project(x - alpha g), so every
// iterate is feasible. Line-search failure is reported, not thrown.
OptimResult projected_gd(const Objective& f, const Gradient& grad, const Projection& project,
                         std::vector<double> x0, double tol, const LineSearchConfig& ls,
                         int max_iter, const InnerProduct& ip,
                         ProjectedStop rule = ProjectedStop::step_norm);

// Dense inverse-Hessian BFGS, self-adjoint in the supplied inner product. Stops on
// ||g|| < gtol. Updates with non-positive curvature <y, s> are skipped; a non-descent
// direction resets the approximation to the identity.
OptimResult bfgs(const Objective& f, const Gradient& grad, std::vector<double> x0, double gtol,
                 int max_iter, const LineSearchConfig& ls, const InnerProduct& ip);

// Limited-memory BFGS (two-loop recursion, history m). The line search backtracks on
// the Armijo condition; the Wolfe curvature inequality decides whether the step's
// (s, y) pair enters the history, which keeps the implicit Hessian positive.
OptimResult lbfgs(const Objective& f, const Gradient& grad, std::vector<double> x0, double gtol,
                  int m, const LineSearchConfig& ls, int max_iter, const InnerProduct& ip);

} // namespace rockrelax
