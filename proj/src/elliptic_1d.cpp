#include "rockrelax/elliptic_1d.hpp"

#include "rockrelax/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace rockrelax {

TriDiagSystem assemble_1d(const std::vector<double>& coef_mid,
                          const std::vector<double>& source,
                          const Grid1D& grid) {
    const int n = grid.n_cells;
    if (static_cast<int>(coef_mid.size()) != n)
        throw std::invalid_argument("assemble_1d: expected one coefficient per cell");
    if (static_cast<int>(source.size()) != grid.n_nodes())
        throw std::invalid_argument("assemble_1d: expected one source value per node");
    for (double a : coef_mid)
        if (!(a > 0.0))
            throw CoercivityError("assemble_1d: coefficient must be strictly positive");

    const int m = n - 1; // interior unknowns
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    TriDiagSystem sys;
    sys.diag.resize(m);
    sys.lower.resize(m > 0 ? m - 1 : 0);
    sys.upper.resize(m > 0 ? m - 1 : 0);
    sys.rhs.resize(m);
    for (int j = 1; j <= m; ++j) {
        sys.diag[j - 1] = (coef_mid[j - 1] + coef_mid[j]) * inv_h2;
        sys.rhs[j - 1] = source[j];
        if (j < m) {
            sys.upper[j - 1] = -coef_mid[j] * inv_h2;
            sys.lower[j - 1] = sys.upper[j - 1];
        }
    }
    return sys;
}

std::vector<double> thomas_solve(TriDiagSystem sys) {
    const int m = static_cast<int>(sys.diag.size());
    if (m == 0)
        return {};
    // Forward elimination on (lower, diag, rhs), then back substitution.
    for (int i = 1; i < m; ++i) {
        double w = sys.lower[i - 1] / sys.diag[i - 1];
        sys.diag[i] -= w * sys.upper[i - 1];
        sys.rhs[i] -= w * sys.rhs[i - 1];
    }
    std::vector<double> x(m);
    x[m - 1] = sys.rhs[m - 1] / sys.diag[m - 1];
    for (int i = m - 2; i >= 0; --i)
        x[i] = (sys.rhs[i] - sys.upper[i] * x[i + 1]) / sys.diag[i];
    return x;
}

StateField1D solve_state_1d_mid(const std::vector<double>& coef_mid,
                                const std::vector<double>& z,
                                const Grid1D& grid) {
    TriDiagSystem sys = assemble_1d(coef_mid, z, grid);
    std::vector<double> interior = thomas_solve(std::move(sys));
    StateField1D u;
    u.grid = &grid;
    u.values.assign(grid.n_nodes(), 0.0);
    for (int j = 1; j < grid.n_cells; ++j)
        u.values[j] = interior[j - 1];
    return u;
}

StateField1D solve_state_1d(const std::function<double(double)>& coef,
                            const std::vector<double>& z,
                            const Grid1D& grid) {
    std::vector<double> coef_mid(grid.n_cells);
    for (int c = 0; c < grid.n_cells; ++c)
        coef_mid[c] = coef((c + 0.5) * grid.h);
    return solve_state_1d_mid(coef_mid, z, grid);
}

StateField1D solve_adjoint_1d_mid(const std::vector<double>& coef_mid,
                                  const std::vector<double>& residual,
                                  const Grid1D& grid) {
    return solve_state_1d_mid(coef_mid, residual, grid);
}

StateField1D solve_adjoint_1d(const std::function<double(double)>& coef,
                              const std::vector<double>& residual,
                              const Grid1D& grid) {
    return solve_state_1d(coef, residual, grid);
}

double h1_seminorm(const std::vector<double>& v, const Grid1D& grid) {
    if (static_cast<int>(v.size()) != grid.n_nodes())
        throw std::invalid_argument("h1_seminorm: value count does not match grid");
    double acc = 0.0;
    for (int c = 0; c < grid.n_cells; ++c) {
        double d = (v[c + 1] - v[c]) / grid.h;
        acc += d * d * grid.h;
    }
    return std::sqrt(acc);
}

} // namespace rockrelax
