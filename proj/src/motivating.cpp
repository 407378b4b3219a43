#include "rockrelax/motivating.hpp"

#include "rockrelax/errors.hpp"
#include "rockrelax/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rockrelax {

namespace {

constexpr double kSlack = 1e-12;

void check_inst(const MotivatingInstance& inst) {
    if (!(inst.eps > 0.0 && inst.eps < 1.0))
        throw std::invalid_argument("corruption eps must lie in (0, 1)");
    if (!(inst.theta > 0.0))
        throw std::invalid_argument("penalty theta must be positive");
}

void check_x(double x) {
    if (x < -kSlack || x > 1.0 + kSlack)
        throw InfeasibleError("decision variable left [0, 1]");
}

} // namespace

double phi_uncorrupted(double x) {
    check_x(x);
    return 0.5 * (1.0 - x);
}

double phi_corrupted(double x, double eps) {
    MotivatingInstance inst;
    inst.eps = eps;
    inst.theta = 1.0; // irrelevant at t = 0
    return motivating_objective(inst, x, 0.0);
}

double motivating_objective(const MotivatingInstance& inst, double x, double t2) {
    check_inst(inst);
    check_x(x);
    // Simplex feasibility of p + t with t1 = -t2: the perturbed outlier
    // probability eps + t2 must stay in [0, 1].
    if (t2 < -inst.eps - kSlack || t2 > 1.0 - inst.eps + kSlack)
        throw InfeasibleError("perturbed probabilities left the simplex");
    // (eps + t2)/eps is exactly 1 at t2 = 0, which makes the t = 0 anchor
    // agree bitwise with the corrupted objective.
    const double outlier_weight = (inst.eps + t2) / inst.eps;
    return 0.5 * (1.0 - x) + outlier_weight * x + 0.5 * inst.theta * 2.0 * t2 * t2;
}

MotivatingSolution solve_rockafellian_closed_form(const MotivatingInstance& inst) {
    check_inst(inst);
    const double threshold = 4.0 / (inst.eps * inst.eps); // (eps/2)^-2
    if (inst.theta >= threshold)
        throw std::invalid_argument("closed form requires theta < (eps/2)^-2");
    return {1.0, {inst.eps, -inst.eps}};
}

MotivatingSolution solve_rockafellian_numeric(const MotivatingInstance& inst, int grid_n) {
    check_inst(inst);
    if (grid_n < 2) throw std::invalid_argument("grid resolution must be at least 2");

    // Coarse global scan over the box [0,1] x [-eps, 1-eps].
    double best_x = 0.0, best_t2 = 0.0;
    double best_val = motivating_objective(inst, 0.0, 0.0);
    for (int i = 0; i <= grid_n; ++i) {
        const double x = static_cast<double>(i) / grid_n;
        for (int j = 0; j <= grid_n; ++j) {
            const double t2 = -inst.eps + static_cast<double>(j) / grid_n;
            const double val = motivating_objective(inst, x, t2);
            if (val < best_val) {
                best_val = val;
                best_x = x;
                best_t2 = t2;
            }
        }
    }

    // Projected-gradient polish; the projection keeps (x, p + t) feasible at
    // every iterate, so the objective never throws.
    Objective f = [&](const std::vector<double>& v) {
        return motivating_objective(inst, v[0], v[1]);
    };
    Gradient g = [&](const std::vector<double>& v) {
        return std::vector<double>{-0.5 + (inst.eps + v[1]) / inst.eps,
                                   v[0] / inst.eps + 2.0 * inst.theta * v[1]};
    };
    Projection project = [&](const std::vector<double>& v) {
        return std::vector<double>{std::clamp(v[0], 0.0, 1.0),
                                   std::clamp(v[1], -inst.eps, 1.0 - inst.eps)};
    };
    OptimResult res = projected_gd(f, g, project, {best_x, best_t2}, 1e-12, LineSearchConfig{},
                                   1000, InnerProduct::euclidean());

    MotivatingSolution sol;
    sol.x = res.x[0];
    sol.t = {-res.x[1], res.x[1]};
    return sol;
}

} // namespace rockrelax
