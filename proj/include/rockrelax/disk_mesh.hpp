#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace rockrelax {

/// Triangulation of the unit disk built from concentric rings.
///
/// Ring k (k = 1..rings) carries 6k vertices at radius k/rings; vertex 0 is
/// the center. All triangles are counterclockwise. free_index maps a vertex
/// to its position among non-boundary vertices (-1 on the boundary); it is
/// the DOF numbering used by the homogeneous-Dirichlet solvers.
struct DiskMesh2D {
    std::vector<double> vx, vy;                 // vertex coordinates
    std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
    std::vector<std::uint8_t> boundary_flags;   // 1 if boundary vertex
    int rings = 0;

    std::vector<int> free_index;   // vertex -> interior DOF index or -1
    std::vector<int> free_verts;   // interior DOF index -> vertex

    int n_dof() const { return static_cast<int>(vx.size()); }
    int n_free() const { return static_cast<int>(free_verts.size()); }
};

/// Build a concentric-ring triangulation whose vertex count is as close as
/// possible to target_dof (1 + 3R(R+1) vertices for R rings; within +-20%
/// of the target for any target_dof >= 10).
DiskMesh2D build_disk_mesh(int target_dof);

/// Same mesh selected directly by ring count (used by refinement studies).
DiskMesh2D build_disk_mesh_rings(int rings);

/// Signed area of triangle t (positive for CCW orientation).
double triangle_area(const DiskMesh2D& mesh, int t);

} // namespace rockrelax
