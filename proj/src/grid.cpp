#include "rockrelax/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rockrelax {

Grid1D Grid1D::uniform(int n_cells) {
    if (n_cells < 1)
        throw std::invalid_argument("Grid1D: n_cells must be >= 1");
    Grid1D g;
    g.n_cells = n_cells;
    g.h = 1.0 / n_cells;
    g.nodes.resize(n_cells + 1);
    for (int j = 0; j <= n_cells; ++j)
        g.nodes[j] = static_cast<double>(j) / n_cells;
    g.nodes.front() = 0.0;
    g.nodes.back() = 1.0;
    return g;
}

double trapezoid_integrate(const std::vector<double>& f, const Grid1D& grid) {
    if (static_cast<int>(f.size()) != grid.n_nodes())
        throw std::invalid_argument("trapezoid_integrate: value count does not match grid");
    double acc = 0.5 * (f.front() + f.back());
    for (std::size_t j = 1; j + 1 < f.size(); ++j)
        acc += f[j];
    return acc * grid.h;
}

std::vector<double> trapezoid_weights(const Grid1D& grid) {
    std::vector<double> w(grid.n_nodes(), grid.h);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: need at least one node");
    if (!(a < b))
        throw std::invalid_argument("gauss_legendre: require a < b");

    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    // Roots of the Legendre polynomial P_n by Newton iteration from the
    // Chebyshev-like initial guess; weights w = 2 / ((1-x^2) P_n'(x)^2).
    const double pi = std::numbers::pi;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n and P_n' via the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            if (n == 1) p0 = 1.0;
            dp = n * (x * pn - p0) / (x * x - 1.0);
            double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map the symmetric pair from [-1,1] to [a,b].
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        rule.nodes[i] = mid - half * x; // x > 0 for these i; keep nodes ascending
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.5 * (a + b);
        // Middle weight: re-derive from P_n'(0).
        double p0 = 1.0, p1 = 0.0;
        for (int k = 2; k <= n; ++k) {
            double p2 = (-(k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        // P_n'(0) = n * P_{n-1}(0) for odd n (P_n(0) = 0).
        double dp0 = n * p0;
        rule.weights[n / 2] = 0.5 * (b - a) * 2.0 / (dp0 * dp0);
    }
    return rule;
}

} // namespace rockrelax
