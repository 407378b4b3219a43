#include "rockrelax/disk_mesh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rockrelax {

namespace {

// Vertices on ring k start at 1 + 3k(k-1) (ring i holds 6i vertices).
int ring_offset(int k) { return 1 + 3 * k * (k - 1); }

int vertex_count(int rings) { return 1 + 3 * rings * (rings + 1); }

} // namespace

double triangle_area(const DiskMesh2D& m, int t) {
    const auto& tri = m.triangles[t];
    double ax = m.vx[tri[0]], ay = m.vy[tri[0]];
    double bx = m.vx[tri[1]], by = m.vy[tri[1]];
    double cx = m.vx[tri[2]], cy = m.vy[tri[2]];
    return 0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay));
}

DiskMesh2D build_disk_mesh_rings(int rings) {
    if (rings < 1)
        throw std::invalid_argument("build_disk_mesh_rings: need at least one ring");

    DiskMesh2D mesh;
    mesh.rings = rings;
    const int nv = vertex_count(rings);
    mesh.vx.resize(nv);
    mesh.vy.resize(nv);
    mesh.boundary_flags.assign(nv, 0);

    mesh.vx[0] = 0.0;
    mesh.vy[0] = 0.0;
    const double pi = std::numbers::pi;
    for (int k = 1; k <= rings; ++k) {
        const double r = static_cast<double>(k) / rings;
        const int nk = 6 * k;
        const int off = ring_offset(k);
        for (int j = 0; j < nk; ++j) {
            double ang = 2.0 * pi * j / nk;
            mesh.vx[off + j] = r * std::cos(ang);
            mesh.vy[off + j] = r * std::sin(ang);
        }
    }
    for (int j = 0; j < 6 * rings; ++j)
        mesh.boundary_flags[ring_offset(rings) + j] = 1;

    // Center fan.
    mesh.triangles.reserve(6 * rings * rings);
    for (int j = 0; j < 6; ++j)
        mesh.triangles.push_back({0, 1 + j, 1 + (j + 1) % 6});

    // Annulus between ring k-1 and ring k: advance two angular pointers,
    // emitting one CCW triangle per step (6(2k-1) triangles per annulus).
    for (int k = 2; k <= rings; ++k) {
        const int ni = 6 * (k - 1), no = 6 * k;
        const int oi = ring_offset(k - 1), oo = ring_offset(k);
        int a = 0, b = 0;
        while (a < ni || b < no) {
            bool advance_inner =
                a < ni && (b == no || static_cast<long>(a + 1) * no <= static_cast<long>(b + 1) * ni);
            int ia = oi + a % ni;
            int ob = oo + b % no;
            if (advance_inner) {
                mesh.triangles.push_back({ia, ob, oi + (a + 1) % ni});
                ++a;
            } else {
                mesh.triangles.push_back({ia, ob, oo + (b + 1) % no});
                ++b;
            }
        }
    }

    mesh.free_index.assign(nv, -1);
    for (int v = 0; v < nv; ++v) {
        if (!mesh.boundary_flags[v]) {
            mesh.free_index[v] = static_cast<int>(mesh.free_verts.size());
            mesh.free_verts.push_back(v);
        }
    }
    return mesh;
}

DiskMesh2D build_disk_mesh(int target_dof) {
    if (target_dof < 10)
        throw std::invalid_argument("build_disk_mesh: target_dof must be >= 10");
    // Pick the ring count whose vertex count 1 + 3R(R+1) is closest to the target.
    int best_r = 1;
    long best_err = std::labs(static_cast<long>(vertex_count(1)) - target_dof);
    for (int r = 2; vertex_count(r - 1) < 2 * target_dof; ++r) {
        long err = std::labs(static_cast<long>(vertex_count(r)) - target_dof);
        if (err < best_err) {
            best_err = err;
            best_r = r;
        }
    }
    return build_disk_mesh_rings(best_r);
}

} // namespace rockrelax
