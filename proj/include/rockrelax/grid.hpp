#pragma once

#include <vector>

namespace rockrelax {

/// Uniform grid on [0,1] with n_cells cells and n_cells+1 nodes x_j = j*h.
struct Grid1D {
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> nodes;

    static Grid1D uniform(int n_cells);

    int n_nodes() const { return n_cells + 1; }
};

/// Composite trapezoid rule over nodal values: sum_j h*(f_j + f_{j+1})/2.
double trapezoid_integrate(const std::vector<double>& f_values, const Grid1D& grid);

/// Nodal quadrature weights of the composite trapezoid rule:
/// h*(1/2, 1, ..., 1, 1/2). These weights define the discrete L^2 inner
/// product used for 1D control fields throughout the library.
std::vector<double> trapezoid_weights(const Grid1D& grid);

/// Quadrature rule on an interval (a,b).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = 0.0;
    double b = 0.0;
};

/// Gauss-Legendre rule with n nodes mapped affinely onto [a,b].
/// Exact for polynomials up to degree 2n-1.
QuadratureRule gauss_legendre(int n, double a, double b);

} // namespace rockrelax
