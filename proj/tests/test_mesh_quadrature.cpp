#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rockrelax/disk_mesh.hpp"
#include "rockrelax/grid.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

using namespace rockrelax;

namespace {

double trap_sin_pi(int n_cells) {
    Grid1D g = Grid1D::uniform(n_cells);
    std::vector<double> f(g.n_nodes());
    for (int j = 0; j < g.n_nodes(); ++j)
        f[j] = std::sin(std::numbers::pi * g.nodes[j]);
    return trapezoid_integrate(f, g);
}

double quad_apply(const QuadratureRule& q, double (*f)(double)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        acc += q.weights[i] * f(q.nodes[i]);
    return acc;
}

} // namespace

TEST_CASE("uniform grid invariants") {
    Grid1D g = Grid1D::uniform(256);
    CHECK(g.n_nodes() == 257);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 1.0);
    CHECK(g.h * g.n_cells == doctest::Approx(1.0).epsilon(1e-15));
    for (int j = 1; j < g.n_nodes(); ++j)
        CHECK(g.nodes[j] > g.nodes[j - 1]);
    CHECK_THROWS_AS(Grid1D::uniform(0), std::invalid_argument);
}

TEST_CASE("trapezoid rule on constants and linears is exact") {
    Grid1D g = Grid1D::uniform(64);
    std::vector<double> ones(g.n_nodes(), 1.0);
    CHECK(trapezoid_integrate(ones, g) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> lin = g.nodes;
    CHECK(trapezoid_integrate(lin, g) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("trapezoid rule on sin(pi x) at h=1/256") {
    // Exact antiderivative -cos(pi x)/pi gives the integral 2/pi.
    CHECK(trap_sin_pi(256) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-4));
}

TEST_CASE("trapezoid rule rejects mismatched lengths") {
    Grid1D g = Grid1D::uniform(8);
    std::vector<double> bad(7, 1.0);
    CHECK_THROWS_AS(trapezoid_integrate(bad, g), std::invalid_argument);
}

TEST_CASE("trapezoid error decays at second order") {
    const double exact = 2.0 / std::numbers::pi;
    double e64 = std::abs(trap_sin_pi(64) - exact);
    double e128 = std::abs(trap_sin_pi(128) - exact);
    double e256 = std::abs(trap_sin_pi(256) - exact);
    CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.10));
    CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("trapezoid weights sum to the interval length") {
    Grid1D g = Grid1D::uniform(100);
    auto w = trapezoid_weights(g);
    double s = 0.0;
    for (double wi : w)
        s += wi;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("gauss-legendre small rules match the classic tables") {
    auto q1 = gauss_legendre(1, -1.0, 1.0);
    REQUIRE(q1.nodes.size() == 1);
    CHECK(q1.nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(q1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

    auto q2 = gauss_legendre(2, -1.0, 1.0);
    REQUIRE(q2.nodes.size() == 2);
    CHECK(q2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(q2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(q2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q2.weights[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gauss-legendre n=8 integrates xi^2 over [3.1, 3.9] exactly") {
    auto q = gauss_legendre(8, 3.1, 3.9);
    double got = quad_apply(q, [](double x) { return x * x; });
    double expected = (3.9 * 3.9 * 3.9 - 3.1 * 3.1 * 3.1) / 3.0;
    CHECK(std::abs(got - expected) < 1e-12);
}

TEST_CASE("gauss-legendre argument validation") {
    CHECK_THROWS_AS(gauss_legendre(0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(3, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(3, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("gauss-legendre weights are positive and sum to b-a") {
    for (int n : {1, 2, 4, 8, 13}) {
        auto q = gauss_legendre(n, -0.7, 2.2);
        double s = 0.0;
        for (double w : q.weights) {
            CHECK(w > 0.0);
            s += w;
        }
        CHECK(std::abs(s - 2.9) < 1e-12);
    }
}

TEST_CASE("gauss-legendre rules are exact up to degree 2n-1") {
    for (int n : {1, 2, 4, 8}) {
        const double a = 0.3, b = 2.7;
        auto q = gauss_legendre(n, a, b);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double got = 0.0;
            for (std::size_t i = 0; i < q.nodes.size(); ++i)
                got += q.weights[i] * std::pow(q.nodes[i], d);
            double exact = (std::pow(b, d + 1) - std::pow(a, d + 1)) / (d + 1);
            CHECK(std::abs(got - exact) / std::abs(exact) < 1e-10);
        }
    }
}

TEST_CASE("disk mesh hits the vertex-count band at the working resolution") {
    DiskMesh2D m = build_disk_mesh(5185);
    CHECK(m.n_dof() >= 4148);
    CHECK(m.n_dof() <= 6222);
    // Boundary vertices sit on the unit circle.
    int n_boundary = 0;
    for (int v = 0; v < m.n_dof(); ++v) {
        if (m.boundary_flags[v]) {
            ++n_boundary;
            double r = std::hypot(m.vx[v], m.vy[v]);
            CHECK(std::abs(r - 1.0) < 1e-12);
        }
    }
    CHECK(n_boundary == 6 * m.rings);
    CHECK(m.n_free() == m.n_dof() - n_boundary);
}

TEST_CASE("disk mesh triangles are positively oriented and conforming") {
    for (int target : {10, 300, 5185}) {
        DiskMesh2D m = build_disk_mesh(target);
        CHECK(static_cast<int>(m.triangles.size()) == 6 * m.rings * m.rings);
        for (std::size_t t = 0; t < m.triangles.size(); ++t)
            CHECK(triangle_area(m, static_cast<int>(t)) > 0.0);

        // Every interior edge must be shared by exactly two triangles and
        // every once-used edge must lie on the boundary.
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& tri : m.triangles) {
            for (int e = 0; e < 3; ++e) {
                int u = tri[e], v = tri[(e + 1) % 3];
                if (u > v) std::swap(u, v);
                ++edge_count[{u, v}];
            }
        }
        for (const auto& [edge, count] : edge_count) {
            CHECK(count <= 2);
            CHECK(count >= 1);
            if (count == 1) {
                CHECK(m.boundary_flags[edge.first] == 1);
                CHECK(m.boundary_flags[edge.second] == 1);
            }
        }
    }
}

TEST_CASE("disk mesh area approximates pi and improves monotonically") {
    auto mesh_area = [](int rings) {
        DiskMesh2D m = build_disk_mesh_rings(rings);
        double area = 0.0;
        for (std::size_t t = 0; t < m.triangles.size(); ++t)
            area += triangle_area(m, static_cast<int>(t));
        return area;
    };
    double a41 = mesh_area(41);
    CHECK(std::abs(a41 - std::numbers::pi) / std::numbers::pi < 0.005);

    double prev_gap = 1e300;
    for (int rings : {5, 10, 20, 40}) {
        double gap = std::abs(mesh_area(rings) - std::numbers::pi);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("disk mesh target validation") {
    CHECK_THROWS_AS(build_disk_mesh(9), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh_rings(0), std::invalid_argument);
}
