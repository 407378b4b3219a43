#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rockrelax/disk_mesh.hpp"
#include "rockrelax/elliptic_2d.hpp"
#include "rockrelax/errors.hpp"
#include "rockrelax/sparse.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace rockrelax;

namespace {

// Nodal L2 norm through the consistent mass matrix.
double l2_norm(const DiskMesh2D& mesh, const std::vector<double>& v) {
    SparseSPDMatrix M = assemble_mass(mesh);
    std::vector<double> mv = M.matvec(v);
    double acc = 0.0;
    for (int i = 0; i < mesh.n_dof(); ++i)
        acc += v[i] * mv[i];
    return std::sqrt(acc);
}

double state_error_quadratic_bump(int rings) {
    DiskMesh2D mesh = build_disk_mesh_rings(rings);
    std::vector<double> z(mesh.n_dof(), 4.0);
    StateField2D u = solve_state_2d(mesh, [](double, double) { return 1.0; }, z);
    std::vector<double> err(mesh.n_dof());
    for (int i = 0; i < mesh.n_dof(); ++i) {
        double r2 = mesh.vx[i] * mesh.vx[i] + mesh.vy[i] * mesh.vy[i];
        err[i] = u.values[i] - (1.0 - r2);
    }
    return l2_norm(mesh, err);
}

} // namespace

TEST_CASE("element stiffness on the reference triangle") {
    auto k = p1_element_stiffness(0, 0, 1, 0, 0, 1);
    double expect[9] = {1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5};
    for (int i = 0; i < 9; ++i)
        CHECK(k[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("element stiffness is translation and row-sum neutral") {
    auto k = p1_element_stiffness(0.3, -1.2, 1.7, -0.9, 0.5, 0.4);
    auto ks = p1_element_stiffness(10.3, 4.8, 11.7, 5.1, 10.5, 6.4);
    for (int i = 0; i < 9; ++i)
        CHECK(k[i] == doctest::Approx(ks[i]).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) {
        CHECK(k[3 * i] + k[3 * i + 1] + k[3 * i + 2] == doctest::Approx(0.0).epsilon(1e-13));
        for (int j = 0; j < 3; ++j)
            CHECK(k[3 * i + j] == doctest::Approx(k[3 * j + i]).epsilon(1e-13));
    }
}

TEST_CASE("element mass on the reference triangle") {
    auto m = p1_element_mass(0, 0, 1, 0, 0, 1);
    double s = 0.5 / 12.0;
    double expect[9] = {2 * s, s, s, s, 2 * s, s, s, s, 2 * s};
    for (int i = 0; i < 9; ++i)
        CHECK(m[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("stiffness rows away from the boundary sum to zero") {
    DiskMesh2D mesh = build_disk_mesh(300);
    SparseSPDMatrix K = assemble_stiffness(mesh, [](double, double) { return 1.0; });

    // Mark free vertices that share a triangle with a boundary vertex.
    std::vector<char> touches(mesh.n_dof(), 0);
    for (const auto& tri : mesh.triangles) {
        bool has_bnd = mesh.boundary_flags[tri[0]] || mesh.boundary_flags[tri[1]] ||
                       mesh.boundary_flags[tri[2]];
        if (has_bnd)
            for (int v = 0; v < 3; ++v)
                touches[tri[v]] = 1;
    }

    int deep_rows = 0;
    for (int f = 0; f < K.n; ++f) {
        int vert = mesh.free_verts[f];
        if (touches[vert])
            continue;
        ++deep_rows;
        double row_sum = 0.0;
        for (int k = K.row_ptr[f]; k < K.row_ptr[f + 1]; ++k)
            row_sum += K.vals[k];
        CHECK(std::abs(row_sum) < 1e-12);
    }
    CHECK(deep_rows > 0);
}

TEST_CASE("stiffness scales linearly in the coefficient") {
    DiskMesh2D mesh = build_disk_mesh(300);
    SparseSPDMatrix K1 = assemble_stiffness(mesh, [](double, double) { return 1.0; });
    SparseSPDMatrix K2 = assemble_stiffness(mesh, [](double, double) { return 2.0; });
    REQUIRE(K1.vals.size() == K2.vals.size());
    for (std::size_t i = 0; i < K1.vals.size(); ++i)
        CHECK(K2.vals[i] == doctest::Approx(2.0 * K1.vals[i]).epsilon(1e-13));
}

TEST_CASE("stiffness is symmetric positive definite") {
    DiskMesh2D mesh = build_disk_mesh(300);
    SparseSPDMatrix K = assemble_stiffness(
        mesh, [](double x, double y) { return 1.0 + 0.5 * std::sin(3.0 * x) * std::cos(2.0 * y); });
    for (int i = 0; i < K.n; i += 7)
        for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k)
            CHECK(K.entry(i, K.cols[k]) == doctest::Approx(K.entry(K.cols[k], i)).epsilon(1e-13));

    std::mt19937 rng(987654321u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> v(K.n);
        for (auto& vi : v)
            vi = unif(rng);
        std::vector<double> kv = K.matvec(v);
        double quad = 0.0;
        for (int i = 0; i < K.n; ++i)
            quad += v[i] * kv[i];
        CHECK(quad > 0.0);
    }
}

TEST_CASE("non-positive coefficient is rejected") {
    DiskMesh2D mesh = build_disk_mesh(300);
    CHECK_THROWS_AS(assemble_stiffness(mesh, [](double, double) { return 0.0; }), CoercivityError);
    CHECK_THROWS_AS(assemble_stiffness(mesh, [](double x, double) { return x; }), CoercivityError);
}

TEST_CASE("mass matrix totals the mesh area") {
    DiskMesh2D mesh = build_disk_mesh(5185);
    SparseSPDMatrix M = assemble_mass(mesh);
    double total = 0.0;
    for (double v : M.vals)
        total += v;
    double pi = 3.14159265358979323846;
    CHECK(std::abs(total - pi) / pi < 5e-3);

    std::mt19937 rng(24680u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> v(M.n);
    for (auto& vi : v)
        vi = unif(rng);
    std::vector<double> mv = M.matvec(v);
    double quad = 0.0;
    for (int i = 0; i < M.n; ++i)
        quad += v[i] * mv[i];
    CHECK(quad > 0.0);
}

TEST_CASE("restrict and extend round-trip free values") {
    DiskMesh2D mesh = build_disk_mesh(300);
    std::mt19937 rng(13579u);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<double> free_vals(mesh.n_free());
    for (auto& v : free_vals)
        v = unif(rng);
    std::vector<double> full = extend_by_zero(mesh, free_vals);
    for (int i = 0; i < mesh.n_dof(); ++i)
        if (mesh.boundary_flags[i])
            CHECK(full[i] == 0.0);
    std::vector<double> back = restrict_free(mesh, full);
    REQUIRE(back.size() == free_vals.size());
    for (std::size_t i = 0; i < back.size(); ++i)
        CHECK(back[i] == free_vals[i]);
}

TEST_CASE("conjugate gradient solves small reference systems") {
    SparseSPDMatrix I = SparseSPDMatrix::from_dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    int iters = -1;
    std::vector<double> x = solve_cg(I, {1.0, 2.0, 3.0}, 1e-12, &iters);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(x[2] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(iters == 1);

    SparseSPDMatrix A = SparseSPDMatrix::from_dense({{4, 1}, {1, 3}});
    std::vector<double> y = solve_cg(A, {1.0, 2.0}, 1e-12);
    CHECK(y[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-10));
    CHECK(y[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-10));

    int zero_iters = -1;
    std::vector<double> z = solve_cg(A, {0.0, 0.0}, 1e-12, &zero_iters);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    CHECK(zero_iters == 0);
}

TEST_CASE("conjugate gradient reports non-convergence at an impossible tolerance") {
    DiskMesh2D mesh = build_disk_mesh(300);
    SparseSPDMatrix K = assemble_stiffness(mesh, [](double, double) { return 1.0; });
    std::vector<double> rhs(K.n, 1.0);
    CHECK_THROWS_AS(solve_cg(K, rhs, 0.0), ConvergenceError);
}

TEST_CASE("zero control produces the zero state") {
    DiskMesh2D mesh = build_disk_mesh(300);
    std::vector<double> z(mesh.n_dof(), 0.0);
    StateField2D u = solve_state_2d(mesh, [](double, double) { return 1.0; }, z);
    for (double v : u.values)
        CHECK(v == 0.0);
}

TEST_CASE("quadratic bump is recovered on the disk") {
    double err = state_error_quadratic_bump(41);
    CHECK(err < 2e-3);
}

TEST_CASE("state error decays at second order under ring doubling") {
    double e10 = state_error_quadratic_bump(10);
    double e20 = state_error_quadratic_bump(20);
    double e40 = state_error_quadratic_bump(40);
    CHECK(e10 / e20 == doctest::Approx(4.0).epsilon(0.3));
    CHECK(e20 / e40 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("state is linear in the control") {
    DiskMesh2D mesh = build_disk_mesh(300);
    auto coef = [](double x, double y) { return 1.3 + 0.4 * std::sin(2.0 * x + y); };
    std::mt19937 rng(11223344u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> z1(mesh.n_dof()), z2(mesh.n_dof());
    for (int i = 0; i < mesh.n_dof(); ++i) {
        z1[i] = unif(rng);
        z2[i] = unif(rng);
    }
    StateField2D u1 = solve_state_2d(mesh, coef, z1);
    StateField2D u2 = solve_state_2d(mesh, coef, z2);
    std::vector<double> zc(mesh.n_dof());
    for (int i = 0; i < mesh.n_dof(); ++i)
        zc[i] = 2.0 * z1[i] - 0.7 * z2[i];
    StateField2D uc = solve_state_2d(mesh, coef, zc);
    for (int i = 0; i < mesh.n_dof(); ++i)
        CHECK(uc.values[i] ==
              doctest::Approx(2.0 * u1.values[i] - 0.7 * u2.values[i]).epsilon(1e-8));
}

TEST_CASE("nonnegative source keeps the state nonnegative") {
    DiskMesh2D mesh = build_disk_mesh(5185);
    std::vector<double> z(mesh.n_dof(), 4.0);
    StateField2D u = solve_state_2d(mesh, [](double, double) { return 1.0; }, z);
    double umin = 0.0;
    for (double v : u.values)
        umin = std::min(umin, v);
    CHECK(umin >= -1e-10);
}

TEST_CASE("adjoint solve is the transpose of the state solve") {
    DiskMesh2D mesh = build_disk_mesh(300);
    auto coef = [](double x, double y) { return 1.1 + 0.3 * std::cos(4.0 * x - y); };
    SparseSPDMatrix M = assemble_mass(mesh);
    std::mt19937 rng(20240517u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> z(mesh.n_dof()), res(mesh.n_dof());
        for (int i = 0; i < mesh.n_dof(); ++i) {
            z[i] = unif(rng);
            res[i] = unif(rng);
        }
        StateField2D u = solve_state_2d(mesh, coef, z);
        StateField2D p = solve_adjoint_2d(mesh, coef, res);
        std::vector<double> mz = M.matvec(z);
        std::vector<double> mu = M.matvec(u.values);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < mesh.n_dof(); ++i) {
            lhs += p.values[i] * mz[i];
            rhs += res[i] * mu[i];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("gradient pairing matches the assembled energy") {
    DiskMesh2D mesh = build_disk_mesh(300);
    P1Assembler asmb(mesh);
    auto coefs = asmb.coef_at_centroids(
        [](double x, double y) { return 1.4 + 0.2 * std::sin(x) * std::sin(y); });
    SparseSPDMatrix K = asmb.assemble(coefs);

    std::mt19937 rng(555u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> free_vals(mesh.n_free());
    for (auto& v : free_vals)
        v = unif(rng);
    std::vector<double> u = extend_by_zero(mesh, free_vals);
    std::vector<double> ku = K.matvec(free_vals);
    double energy = 0.0;
    for (int i = 0; i < K.n; ++i)
        energy += free_vals[i] * ku[i];
    CHECK(asmb.grad_dot_sum(u, u, coefs) == doctest::Approx(energy).epsilon(1e-12));
}

TEST_CASE("nodal source vector size is validated") {
    DiskMesh2D mesh = build_disk_mesh(300);
    std::vector<double> bad(mesh.n_dof() - 1, 1.0);
    CHECK_THROWS_AS(solve_state_2d(mesh, [](double, double) { return 1.0; }, bad),
                    std::invalid_argument);
}
