#include "lodthermo/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lodthermo {

TriMesh::TriMesh(int level) : level_(level) {
    if (level < 0 || level > 14)
        throw std::invalid_argument("mesh level must be in [0, 14]");
    cells_ = 1 << level;
}

double TriMesh::h() const { return std::sqrt(2.0) / cells_; }

double TriMesh::tri_area() const { return 0.5 / (double(cells_) * cells_); }

Eigen::Vector2d TriMesh::vertex(int v) const {
    auto [ix, iy] = vertex_coords(v);
    double n = cells_;
    return {ix / n, iy / n};
}

std::pair<int, int> TriMesh::vertex_coords(int v) const {
    assert(v >= 0 && v < n_vertices());
    return {v % (cells_ + 1), v / (cells_ + 1)};
}

std::array<int, 3> TriMesh::triangle_coords(int t) const {
    assert(t >= 0 && t < n_triangles());
    int sq = t / 2;
    return {sq % cells_, sq / cells_, t % 2};
}

std::array<int, 3> TriMesh::triangle(int t) const {
    auto [ix, iy, up] = triangle_coords(t);
    int bl = vertex_id(ix, iy);
    int br = vertex_id(ix + 1, iy);
    int tl = vertex_id(ix, iy + 1);
    int tr = vertex_id(ix + 1, iy + 1);
    if (up == 0) return {bl, br, tr};
    return {bl, tr, tl};
}

std::array<Eigen::Vector2d, 3> TriMesh::gradients(int t) const {
    auto tri = triangle(t);
    std::array<Eigen::Vector2d, 3> p;
    for (int i = 0; i < 3; ++i) p[i] = vertex(tri[i]);
    double twoA = (p[1].x() - p[0].x()) * (p[2].y() - p[0].y()) -
                  (p[2].x() - p[0].x()) * (p[1].y() - p[0].y());
    std::array<Eigen::Vector2d, 3> g;
    for (int i = 0; i < 3; ++i) {
        const auto& pj = p[(i + 1) % 3];
        const auto& pk = p[(i + 2) % 3];
        g[i] = Eigen::Vector2d(pj.y() - pk.y(), pk.x() - pj.x()) / twoA;
    }
    return g;
}

std::vector<int> TriMesh::vertex_star(int v) const {
    auto [ix, iy] = vertex_coords(v);
    std::vector<int> out;
    out.reserve(6);
    auto tri_id = [this](int cx, int cy, int up) { return 2 * (cy * cells_ + cx) + up; };
    // cell to the lower-left: v is its tr corner -> both triangles
    if (ix > 0 && iy > 0) {
        out.push_back(tri_id(ix - 1, iy - 1, 0));
        out.push_back(tri_id(ix - 1, iy - 1, 1));
    }
    // lower-right cell: v is its tl corner -> upper triangle only
    if (ix < cells_ && iy > 0) out.push_back(tri_id(ix, iy - 1, 1));
    // upper-left cell: v is its br corner -> lower triangle only
    if (ix > 0 && iy < cells_) out.push_back(tri_id(ix - 1, iy, 0));
    // upper-right cell: v is its bl corner -> both triangles
    if (ix < cells_ && iy < cells_) {
        out.push_back(tri_id(ix, iy, 0));
        out.push_back(tri_id(ix, iy, 1));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool TriMesh::on_side(int v, Side s) const {
    auto [ix, iy] = vertex_coords(v);
    switch (s) {
        case Side::bottom: return iy == 0;
        case Side::right: return ix == cells_;
        case Side::top: return iy == cells_;
        case Side::left: return ix == 0;
    }
    return false;
}

std::vector<int> TriMesh::side_vertices(Side s) const {
    std::vector<int> out;
    out.reserve(cells_ + 1);
    for (int v = 0; v < n_vertices(); ++v)
        if (on_side(v, s)) out.push_back(v);
    return out;
}

std::string TriMesh::dump_off() const {
    std::ostringstream os;
    os << "OFF\n" << n_vertices() << " " << n_triangles() << " 0\n";
    char buf[64];
    for (int v = 0; v < n_vertices(); ++v) {
        auto p = vertex(v);
        std::snprintf(buf, sizeof buf, "%.12g %.12g 0\n", p.x(), p.y());
        os << buf;
    }
    for (int t = 0; t < n_triangles(); ++t) {
        auto tri = triangle(t);
        os << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    }
    return os.str();
}

MeshHierarchy::MeshHierarchy(int coarse_level, int fine_level)
    : coarse_(coarse_level), fine_(fine_level) {
    if (coarse_level > fine_level)
        throw std::invalid_argument("coarse level must not exceed fine level");
    ratio_ = 1 << (fine_level - coarse_level);
}

int MeshHierarchy::node_embed(int cv) const {
    auto [ix, iy] = coarse_.vertex_coords(cv);
    return fine_.vertex_id(ix * ratio_, iy * ratio_);
}

std::vector<int> MeshHierarchy::children(int ct) const {
    auto [cx, cy, cup] = coarse_.triangle_coords(ct);
    std::vector<int> out;
    out.reserve(ratio_ * ratio_);
    int Nf = fine_.cells();
    for (int ly = 0; ly < ratio_; ++ly)
        for (int lx = 0; lx < ratio_; ++lx) {
            int jx = cx * ratio_ + lx, jy = cy * ratio_ + ly;
            for (int up = 0; up < 2; ++up) {
                // fine triangle lies below the cell diagonal iff ly < lx, or on
                // the diagonal cells (lx == ly) for the lower fine triangle
                bool below = (ly < lx) || (ly == lx && up == 0);
                if ((cup == 0) == below) out.push_back(2 * (jy * Nf + jx) + up);
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

int MeshHierarchy::parent(int ft) const {
    auto [jx, jy, up] = fine_.triangle_coords(ft);
    int cx = jx / ratio_, cy = jy / ratio_;
    int lx = jx % ratio_, ly = jy % ratio_;
    bool below = (ly < lx) || (ly == lx && up == 0);
    return 2 * (cy * coarse_.cells() + cx) + (below ? 0 : 1);
}

std::array<double, 3> MeshHierarchy::barycentric_in(int ct, int fv) const {
    auto [cx, cy, cup] = coarse_.triangle_coords(ct);
    auto [fx, fy] = fine_.vertex_coords(fv);
    double r = ratio_;
    double u = (fx - cx * ratio_) / r;
    double v = (fy - cy * ratio_) / r;
    if (cup == 0) return {1.0 - u, u - v, v};  // (bl, br, tr)
    return {1.0 - v, u, v - u};                // (bl, tr, tl)
}

int MeshHierarchy::enclosing_coarse_tri(int fv) const {
    auto [fx, fy] = fine_.vertex_coords(fv);
    int cx = std::min(fx / ratio_, coarse_.cells() - 1);
    int cy = std::min(fy / ratio_, coarse_.cells() - 1);
    int lx = fx - cx * ratio_, ly = fy - cy * ratio_;
    int up = (ly > lx) ? 1 : 0;
    return 2 * (cy * coarse_.cells() + cx) + up;
}

std::vector<int> coarse_patch(const TriMesh& mesh, int K, int k) {
    if (K < 0 || K >= mesh.n_triangles())
        throw std::invalid_argument("patch seed out of range");
    if (k < 0) throw std::invalid_argument("patch width must be >= 0");
    std::vector<char> in_patch(mesh.n_triangles(), 0);
    std::vector<char> vertex_seen(mesh.n_vertices(), 0);
    std::vector<int> current{K};
    in_patch[K] = 1;
    for (int layer = 0; layer < k; ++layer) {
        std::vector<int> added;
        for (int t : current)
            for (int v : mesh.triangle(t)) {
                if (vertex_seen[v]) continue;
                vertex_seen[v] = 1;
                for (int s : mesh.vertex_star(v))
                    if (!in_patch[s]) {
                        in_patch[s] = 1;
                        added.push_back(s);
                    }
            }
        if (added.empty()) break;
        current = std::move(added);
    }
    std::vector<int> out;
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (in_patch[t]) out.push_back(t);
    return out;
}

int saturating_k(const TriMesh& mesh) {
    // every cell is split along the same diagonal, so patch growth is slower
    // across that diagonal than along it and no corner shortcut is safe:
    // scan the eccentricity of every seed
    int worst = 0;
    std::vector<char> in_patch(mesh.n_triangles());
    std::vector<char> vertex_seen(mesh.n_vertices());
    for (int K = 0; K < mesh.n_triangles(); ++K) {
        std::fill(in_patch.begin(), in_patch.end(), 0);
        std::fill(vertex_seen.begin(), vertex_seen.end(), 0);
        std::vector<int> current{K};
        in_patch[K] = 1;
        int covered = 1, layers = 0;
        while (covered < mesh.n_triangles()) {
            std::vector<int> added;
            for (int t : current)
                for (int v : mesh.triangle(t)) {
                    if (vertex_seen[v]) continue;
                    vertex_seen[v] = 1;
                    for (int s : mesh.vertex_star(v))
                        if (!in_patch[s]) {
                            in_patch[s] = 1;
                            added.push_back(s);
                        }
                }
            ++layers;
            covered += (int)added.size();
            current = std::move(added);
        }
        worst = std::max(worst, layers);
    }
    return worst;
}

} // namespace lodthermo
