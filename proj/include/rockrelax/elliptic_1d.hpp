#pragma once

#include "rockrelax/grid.hpp"

#include <functional>
#include <vector>

namespace rockrelax {

/// Symmetric tridiagonal system over the interior nodes of a Grid1D,
/// discretizing -(a(x) u')' = z with homogeneous Dirichlet conditions:
///   [-a_{j-1/2} u_{j-1} + (a_{j-1/2}+a_{j+1/2}) u_j - a_{j+1/2} u_{j+1}] / h^2 = z_j.
struct TriDiagSystem {
    std::vector<double> lower; // sub-diagonal   (size n-1 for n unknowns)
    std::vector<double> diag;  // main diagonal  (size n)
    std::vector<double> upper; // super-diagonal (size n-1, equals lower)
    std::vector<double> rhs;   // right-hand side (size n)
};

/// Nodal field on a Grid1D with values pinned to zero at both endpoints.
struct StateField1D {
    const Grid1D* grid = nullptr;
    std::vector<double> values; // one per node, values[0] = values[n] = 0
};

/// Assemble the interior finite-difference system. coef_at_midpoints holds
/// a(x_{j+1/2}) per cell (n_cells values); source holds z per node.
/// Throws CoercivityError if any coefficient sample is <= 0.
TriDiagSystem assemble_1d(const std::vector<double>& coef_at_midpoints,
                          const std::vector<double>& source,
                          const Grid1D& grid);

/// Solve a tridiagonal system by the Thomas algorithm (consumes the system).
std::vector<double> thomas_solve(TriDiagSystem sys);

/// Forward solve of the boundary value problem with the coefficient sampled
/// at cell midpoints. z holds nodal source values.
StateField1D solve_state_1d(const std::function<double(double)>& coef,
                            const std::vector<double>& z,
                            const Grid1D& grid);

/// Same solve with the midpoint coefficient values supplied directly
/// (hot path for sampled coefficient fields).
StateField1D solve_state_1d_mid(const std::vector<double>& coef_mid,
                                const std::vector<double>& z,
                                const Grid1D& grid);

/// Adjoint solve. The operator is self-adjoint, so this is the forward
/// solve with the data-misfit residual u - u* as the source.
StateField1D solve_adjoint_1d(const std::function<double(double)>& coef,
                              const std::vector<double>& residual,
                              const Grid1D& grid);

StateField1D solve_adjoint_1d_mid(const std::vector<double>& coef_mid,
                                  const std::vector<double>& residual,
                                  const Grid1D& grid);

/// Discrete H^1 seminorm: sqrt(sum_cells ((v_{j+1}-v_j)/h)^2 h).
double h1_seminorm(const std::vector<double>& v, const Grid1D& grid);

} // namespace rockrelax
