#pragma once

#include <array>

namespace rockrelax {

/// Scalar two-atom toy problem: minimize over x in [0,1] the expectation of
/// g(x, xi) = (1-x)/2 + xi x, where the nominal law puts all mass on xi = 0
/// and the corrupted law moves probability eps onto the outlier xi = 1/eps.
/// The relaxation re-weights the two atoms through t = (t1, t2) with
/// p + t on the probability simplex and penalty (theta/2) |t|_2^2.
struct MotivatingInstance {
    double eps = 0.05;
    double theta = 1.0;
};

/// (1 - x)/2; minimized at x = 1.
double phi_uncorrupted(double x);

/// (1 + x)/2; minimized at x = 0. Computed as the relaxed objective at
/// t = 0 so anchoring holds bitwise.
double phi_corrupted(double x, double eps);

/// Phi(x, t2) with t1 = -t2 eliminated:
///   (1-x)/2 + ((eps + t2)/eps) x + (theta/2)(t1^2 + t2^2).
/// Throws InfeasibleError when x leaves [0,1] or p + t leaves the simplex.
double motivating_objective(const MotivatingInstance& inst, double x, double t2);

struct MotivatingSolution {
    double x = 0.0;
    std::array<double, 2> t = {0.0, 0.0};
};

/// The known global minimizer (1, (eps, -eps)) of the relaxed problem,
/// valid for theta < (eps/2)^-2; larger theta is a precondition error
/// (no closed form is asserted there).
MotivatingSolution solve_rockafellian_closed_form(const MotivatingInstance& inst);

/// Grid scan over (x, t2) at resolution 1/grid_n followed by a projected
/// gradient polish. Independent of the closed form.
MotivatingSolution solve_rockafellian_numeric(const MotivatingInstance& inst, int grid_n);

} // namespace rockrelax
