#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lodthermo {

/// Boundary sides of the unit square, used to tag Dirichlet segments.
enum class Side : int { bottom = 0, right = 1, top = 2, left = 3 };

/// Uniform criss-cross triangulation of [0,1]^2 at refinement level m.
///
/// The square is split into N x N cells, N = 2^m, each cell cut along its
/// (+1,+1) diagonal into a lower and an upper triangle.  Everything is index
/// arithmetic on the structured lattice; no connectivity is stored.
///
/// Vertex v = iy*(N+1) + ix sits at (ix/N, iy/N) (row-major, y-major).
/// Triangle t = 2*(iy*N + ix) + up with up=0 the lower triangle
/// (bl, br, tr) and up=1 the upper triangle (bl, tr, tl), both CCW.
class TriMesh {
public:
    explicit TriMesh(int level);

    int level() const { return level_; }
    int cells() const { return cells_; }           ///< N = 2^level per side
    int n_vertices() const { return (cells_ + 1) * (cells_ + 1); }
    int n_triangles() const { return 2 * cells_ * cells_; }
    double h() const;                              ///< longest edge = sqrt(2)/N
    double tri_area() const;                       ///< uniform, 1/(2 N^2)

    Eigen::Vector2d vertex(int v) const;
    std::array<int, 3> triangle(int t) const;      ///< CCW vertex ids

    /// Constant gradients of the three P1 hat functions on triangle t,
    /// ordered like triangle(t).
    std::array<Eigen::Vector2d, 3> gradients(int t) const;

    /// Triangles incident to vertex v (6 in the interior, fewer on the
    /// boundary), ascending.
    std::vector<int> vertex_star(int v) const;

    /// Vertices lying on the given side (corners belong to two sides).
    std::vector<int> side_vertices(Side s) const;
    bool on_side(int v, Side s) const;

    /// OFF-like text dump: "OFF", counts, vertex lines, face lines.
    std::string dump_off() const;

    // lattice helpers
    int vertex_id(int ix, int iy) const { return iy * (cells_ + 1) + ix; }
    std::pair<int, int> vertex_coords(int v) const;
    /// (cell_ix, cell_iy, up) for triangle t
    std::array<int, 3> triangle_coords(int t) const;

private:
    int level_;
    int cells_;
};

/// Nested pair of criss-cross meshes T_H (coarse) and T_h (fine) with
/// coarse_level <= fine_level; the fine mesh refines each coarse triangle
/// into r^2 children, r = 2^(fine_level - coarse_level).
class MeshHierarchy {
public:
    MeshHierarchy(int coarse_level, int fine_level);

    const TriMesh& coarse() const { return coarse_; }
    const TriMesh& fine() const { return fine_; }
    int ratio() const { return ratio_; }

    /// Fine-mesh vertex coinciding with coarse vertex cv.
    int node_embed(int cv) const;

    /// Fine triangles tiling coarse triangle ct (ascending, r^2 of them).
    std::vector<int> children(int ct) const;

    /// Coarse triangle containing fine triangle ft.
    int parent(int ft) const;

    /// Barycentric coordinates of fine vertex fv within coarse triangle ct
    /// (exact: denominators are powers of two).  fv need not lie in ct.
    std::array<double, 3> barycentric_in(int ct, int fv) const;

    /// Some coarse triangle whose closure contains fine vertex fv.
    int enclosing_coarse_tri(int fv) const;

private:
    TriMesh coarse_;
    TriMesh fine_;
    int ratio_;
};

/// Closure patch omega_k(K): k=0 is {K}; each further layer adds every
/// coarse triangle sharing at least a vertex with the current patch.
/// Returns ascending coarse triangle ids.
std::vector<int> coarse_patch(const TriMesh& mesh, int K, int k);

/// Smallest k for which omega_k(K) covers the whole mesh, maximized over K.
int saturating_k(const TriMesh& mesh);

} // namespace lodthermo
