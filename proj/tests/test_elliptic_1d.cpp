#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rockrelax/elliptic_1d.hpp"
#include "rockrelax/errors.hpp"
#include "rockrelax/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace rockrelax;

namespace {

constexpr double kPi = std::numbers::pi;

// Manufactured problem: a = 2, z = 2 pi^2 sin(pi x)  =>  u = sin(pi x).
std::vector<double> manufactured_source(const Grid1D& g) {
    std::vector<double> z(g.n_nodes());
    for (int j = 0; j < g.n_nodes(); ++j)
        z[j] = 2.0 * kPi * kPi * std::sin(kPi * g.nodes[j]);
    return z;
}

double manufactured_max_error(int n_cells) {
    Grid1D g = Grid1D::uniform(n_cells);
    auto u = solve_state_1d([](double) { return 2.0; }, manufactured_source(g), g);
    double err = 0.0;
    for (int j = 0; j < g.n_nodes(); ++j)
        err = std::max(err, std::abs(u.values[j] - std::sin(kPi * g.nodes[j])));
    return err;
}

double trap_dot(const std::vector<double>& a, const std::vector<double>& b, const Grid1D& g) {
    auto w = trapezoid_weights(g);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
        acc += w[j] * a[j] * b[j];
    return acc;
}

} // namespace

TEST_CASE("one-interior-node stencil matches the hand computation") {
    Grid1D g = Grid1D::uniform(2); // h = 1/2, single interior node at x = 1/2
    std::vector<double> a(2, 1.0);
    std::vector<double> z = {0.3, 7.5, -0.1};
    TriDiagSystem sys = assemble_1d(a, z, g);
    REQUIRE(sys.diag.size() == 1);
    CHECK(sys.diag[0] == doctest::Approx(8.0).epsilon(1e-15)); // 2a/h^2
    CHECK(sys.rhs[0] == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(sys.lower.empty());
    CHECK(sys.upper.empty());
}

TEST_CASE("system is linear in the coefficient and symmetric") {
    Grid1D g = Grid1D::uniform(16);
    std::vector<double> a1(16, 1.0), a2(16, 2.0), z(g.n_nodes(), 1.0);
    TriDiagSystem s1 = assemble_1d(a1, z, g);
    TriDiagSystem s2 = assemble_1d(a2, z, g);
    for (std::size_t i = 0; i < s1.diag.size(); ++i) {
        CHECK(s2.diag[i] == doctest::Approx(2.0 * s1.diag[i]).epsilon(1e-15));
        CHECK(s1.diag[i] > 0.0);
    }
    for (std::size_t i = 0; i < s1.upper.size(); ++i) {
        CHECK(s2.upper[i] == doctest::Approx(2.0 * s1.upper[i]).epsilon(1e-15));
        CHECK(s1.lower[i] == s1.upper[i]);
    }
}

TEST_CASE("zero source gives zero rhs and zero solution") {
    Grid1D g = Grid1D::uniform(32);
    std::vector<double> a(32, 1.3), z(g.n_nodes(), 0.0);
    TriDiagSystem sys = assemble_1d(a, z, g);
    for (double r : sys.rhs)
        CHECK(r == 0.0);
    auto u = solve_state_1d([](double) { return 1.3; }, z, g);
    for (double v : u.values)
        CHECK(v == 0.0);
}

TEST_CASE("non-coercive coefficients are rejected") {
    Grid1D g = Grid1D::uniform(4);
    std::vector<double> z(g.n_nodes(), 1.0);
    std::vector<double> a = {1.0, 0.0, 1.0, 1.0};
    CHECK_THROWS_AS(assemble_1d(a, z, g), CoercivityError);
    a[1] = -0.5;
    CHECK_THROWS_AS(assemble_1d(a, z, g), CoercivityError);
    CHECK_THROWS_AS(solve_state_1d([](double x) { return x - 0.5; }, z, g), CoercivityError);
}

TEST_CASE("manufactured solution is reproduced to second order") {
    CHECK(manufactured_max_error(256) <= 5e-4);

    double e64 = manufactured_max_error(64);
    double e128 = manufactured_max_error(128);
    double e256 = manufactured_max_error(256);
    CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("direct solve leaves a vanishing algebraic residual") {
    Grid1D g = Grid1D::uniform(128);
    std::vector<double> a(128);
    for (int c = 0; c < 128; ++c)
        a[c] = 2.0 + std::sin(3.0 * (c + 0.5) * g.h);
    std::vector<double> z = manufactured_source(g);
    TriDiagSystem sys = assemble_1d(a, z, g);
    auto u = solve_state_1d_mid(a, z, g);

    double rnorm = 0.0, bnorm = 0.0;
    const int m = g.n_cells - 1;
    for (int i = 0; i < m; ++i) {
        double Au = sys.diag[i] * u.values[i + 1];
        if (i > 0) Au += sys.lower[i - 1] * u.values[i];
        if (i < m - 1) Au += sys.upper[i] * u.values[i + 2];
        rnorm += (Au - sys.rhs[i]) * (Au - sys.rhs[i]);
        bnorm += sys.rhs[i] * sys.rhs[i];
    }
    CHECK(std::sqrt(rnorm) <= 1e-12 * std::sqrt(bnorm));
}

TEST_CASE("solution operator is homogeneous of degree one") {
    Grid1D g = Grid1D::uniform(100);
    std::vector<double> z(g.n_nodes());
    for (int j = 0; j < g.n_nodes(); ++j)
        z[j] = std::cos(2.0 * kPi * g.nodes[j]) + 0.3;
    std::vector<double> z10(z);
    for (double& v : z10)
        v *= 10.0;
    auto coef = [](double x) { return 1.0 + 0.5 * x; };
    auto u = solve_state_1d(coef, z, g);
    auto u10 = solve_state_1d(coef, z10, g);
    for (int j = 0; j < g.n_nodes(); ++j)
        CHECK(u10.values[j] == doctest::Approx(10.0 * u.values[j]).epsilon(1e-12));
}

TEST_CASE("adjoint solve: zero residual and manufactured residual") {
    Grid1D g = Grid1D::uniform(256);
    std::vector<double> zero(g.n_nodes(), 0.0);
    auto p0 = solve_adjoint_1d([](double) { return 2.0; }, zero, g);
    for (double v : p0.values)
        CHECK(v == 0.0);

    auto p = solve_adjoint_1d([](double) { return 2.0; }, manufactured_source(g), g);
    double err = 0.0;
    for (int j = 0; j < g.n_nodes(); ++j)
        err = std::max(err, std::abs(p.values[j] - std::sin(kPi * g.nodes[j])));
    CHECK(err <= 5e-4);
}

TEST_CASE("discrete self-adjointness identity") {
    // <p, z> = <u - u*, s(xi, z)> with p the adjoint of the residual u - u*.
    Grid1D g = Grid1D::uniform(64);
    std::mt19937 rng(20240517);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto coef = [](double x) { return 1.5 + std::sin(5.0 * x) * 0.4; };
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> z(g.n_nodes()), res(g.n_nodes());
        for (int j = 0; j < g.n_nodes(); ++j) {
            z[j] = unif(rng);
            res[j] = unif(rng);
        }
        auto sz = solve_state_1d(coef, z, g);
        auto p = solve_adjoint_1d(coef, res, g);
        double lhs = trap_dot(p.values, z, g);
        double rhs = trap_dot(res, sz.values, g);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("solution operator is continuous in the control") {
    // s(xi, z + eps w) - s(xi, z) = eps s(xi, w) exactly, and its H1 norm
    // shrinks linearly as eps -> 0.
    Grid1D g = Grid1D::uniform(128);
    auto coef = [](double x) { return 2.0 + x; };
    std::vector<double> z(g.n_nodes()), w(g.n_nodes());
    for (int j = 0; j < g.n_nodes(); ++j) {
        z[j] = std::sin(kPi * g.nodes[j]);
        w[j] = std::cos(3.0 * kPi * g.nodes[j]);
    }
    auto sz = solve_state_1d(coef, z, g);
    auto sw = solve_state_1d(coef, w, g);
    double prev = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        std::vector<double> zeps(z);
        for (int j = 0; j < g.n_nodes(); ++j)
            zeps[j] += eps * w[j];
        auto szeps = solve_state_1d(coef, zeps, g);
        std::vector<double> diff(g.n_nodes());
        for (int j = 0; j < g.n_nodes(); ++j)
            diff[j] = szeps.values[j] - sz.values[j];
        double dn = h1_seminorm(diff, g);
        CHECK(dn == doctest::Approx(eps * h1_seminorm(sw.values, g)).epsilon(1e-10));
        CHECK(dn < prev);
        prev = dn;
    }
}

TEST_CASE("solution operator is continuous in the coefficient") {
    // || s(a_eps, z) - s(a, z) ||_H1 <= C max|a_eps - a| with C estimated on
    // the coarsest grid and holding under refinement.
    auto run = [](int n_cells, double eps) {
        Grid1D g = Grid1D::uniform(n_cells);
        std::vector<double> z = manufactured_source(g);
        auto base = [](double x) { return 2.0 + 0.3 * std::sin(2.0 * x); };
        auto pert = [&](double x) { return base(x) + eps * std::cos(7.0 * x); };
        auto u = solve_state_1d(base, z, g);
        auto ue = solve_state_1d(pert, z, g);
        std::vector<double> diff(g.n_nodes());
        for (int j = 0; j < g.n_nodes(); ++j)
            diff[j] = ue.values[j] - u.values[j];
        return h1_seminorm(diff, g) / eps; // max perturbation is eps itself
    };
    const double eps = 1e-3;
    double c_coarse = 1.5 * run(64, eps);
    CHECK(run(128, eps) <= c_coarse);
    CHECK(run(256, eps) <= c_coarse);
}
