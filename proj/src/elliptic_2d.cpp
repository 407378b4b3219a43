#include "rockrelax/elliptic_2d.hpp"

#include "rockrelax/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rockrelax {

std::array<double, 9> p1_element_stiffness(double x1, double y1, double x2, double y2,
                                           double x3, double y3) {
    // Gradients of the barycentric basis: grad phi_i = (b_i, c_i) / (2A).
    double b[3] = {y2 - y3, y3 - y1, y1 - y2};
    double c[3] = {x3 - x2, x1 - x3, x2 - x1};
    double two_a = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
    double area = 0.5 * two_a;
    std::array<double, 9> k{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            k[3 * i + j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
    return k;
}

std::array<double, 9> p1_element_mass(double x1, double y1, double x2, double y2,
                                      double x3, double y3) {
    double two_a = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
    double s = 0.5 * two_a / 12.0;
    return {2 * s, s, s, s, 2 * s, s, s, s, 2 * s};
}

P1Assembler::P1Assembler(const DiskMesh2D& mesh) : mesh_(&mesh) {
    const auto& tris = mesh.triangles;
    const int nt = static_cast<int>(tris.size());
    bc_.resize(nt);
    area_.resize(nt);
    centroids_.resize(nt);

    // Sparsity of the interior-DOF stiffness: vertex adjacency via triangles.
    const int nf = mesh.n_free();
    std::vector<std::vector<int>> adj(nf);
    for (int f = 0; f < nf; ++f)
        adj[f].push_back(f);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = tris[t];
        double x[3], y[3];
        for (int v = 0; v < 3; ++v) {
            x[v] = mesh.vx[tri[v]];
            y[v] = mesh.vy[tri[v]];
        }
        bc_[t] = {y[1] - y[2], y[2] - y[0], y[0] - y[1],
                  x[2] - x[1], x[0] - x[2], x[1] - x[0]};
        double two_a = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
        area_[t] = 0.5 * two_a;
        if (!(area_[t] > 0.0))
            throw std::invalid_argument("P1Assembler: mesh has a non-positive triangle");
        centroids_[t] = {(x[0] + x[1] + x[2]) / 3.0, (y[0] + y[1] + y[2]) / 3.0};

        for (int i = 0; i < 3; ++i) {
            int fi = mesh.free_index[tri[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                int fj = mesh.free_index[tri[j]];
                if (fj >= 0 && fi != fj)
                    adj[fi].push_back(fj);
            }
        }
    }

    pattern_.n = nf;
    pattern_.row_ptr.assign(nf + 1, 0);
    for (int f = 0; f < nf; ++f) {
        auto& row = adj[f];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        pattern_.row_ptr[f + 1] = pattern_.row_ptr[f] + static_cast<int>(row.size());
    }
    pattern_.cols.reserve(pattern_.row_ptr[nf]);
    for (int f = 0; f < nf; ++f)
        pattern_.cols.insert(pattern_.cols.end(), adj[f].begin(), adj[f].end());
    pattern_.vals.assign(pattern_.cols.size(), 0.0);

    // Precompute the CSR slot of every local (i,j) pair per triangle.
    auto slot = [&](int fi, int fj) {
        for (int k = pattern_.row_ptr[fi]; k < pattern_.row_ptr[fi + 1]; ++k)
            if (pattern_.cols[k] == fj)
                return k;
        return -1;
    };
    scatter_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = tris[t];
        for (int i = 0; i < 3; ++i) {
            int fi = mesh.free_index[tri[i]];
            for (int j = 0; j < 3; ++j) {
                int fj = mesh.free_index[tri[j]];
                scatter_[t][3 * i + j] = (fi >= 0 && fj >= 0) ? slot(fi, fj) : -1;
            }
        }
    }
}

std::vector<double> P1Assembler::coef_at_centroids(
    const std::function<double(double, double)>& coef) const {
    std::vector<double> a(centroids_.size());
    for (std::size_t t = 0; t < centroids_.size(); ++t)
        a[t] = coef(centroids_[t][0], centroids_[t][1]);
    return a;
}

SparseSPDMatrix P1Assembler::assemble(const std::vector<double>& coef_per_tri) const {
    if (coef_per_tri.size() != area_.size())
        throw std::invalid_argument("P1Assembler: expected one coefficient per triangle");
    SparseSPDMatrix A = pattern_;
    for (std::size_t t = 0; t < area_.size(); ++t) {
        double a = coef_per_tri[t];
        if (!(a > 0.0))
            throw CoercivityError("P1Assembler: coefficient must be strictly positive");
        const auto& bc = bc_[t];
        const double scale = a / (4.0 * area_[t]);
        const auto& sc = scatter_[t];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                int pos = sc[3 * i + j];
                if (pos >= 0)
                    A.vals[pos] += scale * (bc[i] * bc[j] + bc[3 + i] * bc[3 + j]);
            }
        }
    }
    return A;
}

double P1Assembler::grad_dot_sum(const std::vector<double>& u, const std::vector<double>& p,
                                 const std::vector<double>& coef_per_tri) const {
    const auto& tris = mesh_->triangles;
    double acc = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& tri = tris[t];
        const auto& bc = bc_[t];
        double gux = 0.0, guy = 0.0, gpx = 0.0, gpy = 0.0;
        for (int i = 0; i < 3; ++i) {
            gux += u[tri[i]] * bc[i];
            guy += u[tri[i]] * bc[3 + i];
            gpx += p[tri[i]] * bc[i];
            gpy += p[tri[i]] * bc[3 + i];
        }
        // grad = (sum b, sum c) / (2A); the |T| factor leaves 1/(4A).
        acc += coef_per_tri[t] * (gux * gpx + guy * gpy) / (4.0 * area_[t]);
    }
    return acc;
}

SparseSPDMatrix assemble_stiffness(const DiskMesh2D& mesh,
                                   const std::function<double(double, double)>& coef) {
    P1Assembler asmb(mesh);
    return asmb.assemble(asmb.coef_at_centroids(coef));
}

SparseSPDMatrix assemble_mass(const DiskMesh2D& mesh) {
    const int nv = mesh.n_dof();
    const auto& tris = mesh.triangles;
    std::vector<std::vector<int>> adj(nv);
    for (int v = 0; v < nv; ++v)
        adj[v].push_back(v);
    for (const auto& tri : tris)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (tri[i] != tri[j])
                    adj[tri[i]].push_back(tri[j]);

    SparseSPDMatrix M;
    M.n = nv;
    M.row_ptr.assign(nv + 1, 0);
    for (int v = 0; v < nv; ++v) {
        auto& row = adj[v];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        M.row_ptr[v + 1] = M.row_ptr[v] + static_cast<int>(row.size());
    }
    for (int v = 0; v < nv; ++v)
        M.cols.insert(M.cols.end(), adj[v].begin(), adj[v].end());
    M.vals.assign(M.cols.size(), 0.0);

    auto slot = [&](int i, int j) {
        for (int k = M.row_ptr[i]; k < M.row_ptr[i + 1]; ++k)
            if (M.cols[k] == j)
                return k;
        return -1;
    };
    for (const auto& tri : tris) {
        auto me = p1_element_mass(mesh.vx[tri[0]], mesh.vy[tri[0]], mesh.vx[tri[1]],
                                  mesh.vy[tri[1]], mesh.vx[tri[2]], mesh.vy[tri[2]]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                M.vals[slot(tri[i], tri[j])] += me[3 * i + j];
    }
    return M;
}

std::vector<double> restrict_free(const DiskMesh2D& mesh, const std::vector<double>& full) {
    std::vector<double> out(mesh.n_free());
    for (int f = 0; f < mesh.n_free(); ++f)
        out[f] = full[mesh.free_verts[f]];
    return out;
}

std::vector<double> extend_by_zero(const DiskMesh2D& mesh, const std::vector<double>& free_vals) {
    std::vector<double> out(mesh.n_dof(), 0.0);
    for (int f = 0; f < mesh.n_free(); ++f)
        out[mesh.free_verts[f]] = free_vals[f];
    return out;
}

namespace {

StateField2D solve_dirichlet(const DiskMesh2D& mesh,
                             const std::function<double(double, double)>& coef,
                             const std::vector<double>& source_nodal) {
    if (static_cast<int>(source_nodal.size()) != mesh.n_dof())
        throw std::invalid_argument("solve_state_2d: nodal source size mismatch");
    SparseSPDMatrix K = assemble_stiffness(mesh, coef);
    SparseSPDMatrix M = assemble_mass(mesh);
    std::vector<double> rhs = restrict_free(mesh, M.matvec(source_nodal));
    std::vector<double> u_free = solve_cg(K, rhs, 1e-10);
    StateField2D u;
    u.mesh = &mesh;
    u.values = extend_by_zero(mesh, u_free);
    return u;
}

} // namespace

StateField2D solve_state_2d(const DiskMesh2D& mesh,
                            const std::function<double(double, double)>& coef,
                            const std::vector<double>& z) {
    return solve_dirichlet(mesh, coef, z);
}

StateField2D solve_adjoint_2d(const DiskMesh2D& mesh,
                              const std::function<double(double, double)>& coef,
                              const std::vector<double>& residual) {
    return solve_dirichlet(mesh, coef, residual);
}

} // namespace rockrelax
