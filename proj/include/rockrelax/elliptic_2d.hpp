#pragma once

#include "rockrelax/disk_mesh.hpp"
#include "rockrelax/sparse.hpp"

#include <array>
#include <functional>
#include <vector>

namespace rockrelax {

/// Nodal field on a DiskMesh2D; boundary vertices carry exact zeros for
/// solution fields.
struct StateField2D {
    const DiskMesh2D* mesh = nullptr;
    std::vector<double> values; // one per vertex
};

/// Element stiffness of the P1 triangle (a = 1), row-major 3x3.
std::array<double, 9> p1_element_stiffness(double x1, double y1, double x2, double y2,
                                           double x3, double y3);

/// Element mass of the P1 triangle, row-major 3x3: (area/12) * [2 1 1; 1 2 1; 1 1 2].
std::array<double, 9> p1_element_mass(double x1, double y1, double x2, double y2,
                                      double x3, double y3);

/// Precomputed element geometry plus the free-DOF sparsity pattern, so a
/// stiffness matrix for a new coefficient costs one scaled scatter pass.
/// The coefficient is sampled once per triangle (centroid value).
class P1Assembler {
public:
    explicit P1Assembler(const DiskMesh2D& mesh);

    const DiskMesh2D& mesh() const { return *mesh_; }

    /// Centroid samples of a coefficient function, ordered like triangles.
    std::vector<double> coef_at_centroids(const std::function<double(double, double)>& coef) const;

    /// Stiffness over interior DOFs for per-triangle coefficient values.
    /// Throws CoercivityError if any value is <= 0.
    SparseSPDMatrix assemble(const std::vector<double>& coef_per_tri) const;

    /// sum_T coef_T * (grad u . grad p)|_T * |T| for nodal fields u, p —
    /// the bilinear form underpinning coefficient-derivative terms.
    double grad_dot_sum(const std::vector<double>& u, const std::vector<double>& p,
                        const std::vector<double>& coef_per_tri) const;

    const std::vector<std::array<double, 2>>& centroids() const { return centroids_; }

private:
    const DiskMesh2D* mesh_;
    SparseSPDMatrix pattern_;                   // zero-valued CSR over free DOFs
    std::vector<std::array<double, 6>> bc_;     // per-tri b1,b2,b3,c1,c2,c3
    std::vector<double> area_;
    std::vector<std::array<double, 2>> centroids_;
    std::vector<std::array<int, 9>> scatter_;   // CSR value index per local pair, -1 constrained
};

/// One-shot stiffness matrix over interior DOFs.
SparseSPDMatrix assemble_stiffness(const DiskMesh2D& mesh,
                                   const std::function<double(double, double)>& coef);

/// Consistent P1 mass matrix over all vertices.
SparseSPDMatrix assemble_mass(const DiskMesh2D& mesh);

/// Restrict a full nodal vector to the interior DOFs.
std::vector<double> restrict_free(const DiskMesh2D& mesh, const std::vector<double>& full);

/// Extend an interior-DOF vector by zeros on the boundary.
std::vector<double> extend_by_zero(const DiskMesh2D& mesh, const std::vector<double>& free_vals);

/// Solve -div(a grad u) = z with homogeneous Dirichlet data by CG
/// (relative residual <= 1e-10). z holds nodal source values.
StateField2D solve_state_2d(const DiskMesh2D& mesh,
                            const std::function<double(double, double)>& coef,
                            const std::vector<double>& z);

/// Adjoint solve: same operator (self-adjoint), source M * residual with
/// residual = u - u* given nodally.
StateField2D solve_adjoint_2d(const DiskMesh2D& mesh,
                              const std::function<double(double, double)>& coef,
                              const std::vector<double>& residual);

} // namespace rockrelax
