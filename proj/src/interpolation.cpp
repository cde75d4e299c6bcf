#include "lodthermo/interpolation.hpp"

#include <stdexcept>

namespace lodthermo {

Interpolator build_interpolator(const MeshHierarchy& hier, const DofMap& fine_map,
                                const DofMap& coarse_map) {
    const TriMesh& fine = hier.fine();
    const TriMesh& coarse = hier.coarse();
    if (fine_map.field() != coarse_map.field())
        throw std::invalid_argument("interpolator maps must share the field");
    if (fine_map.n_vertices() != fine.n_vertices() ||
        coarse_map.n_vertices() != coarse.n_vertices())
        throw std::invalid_argument("dof maps do not match the hierarchy meshes");
    if (fine_map.dirichlet_sides() != coarse_map.dirichlet_sides())
        throw std::invalid_argument("interpolator maps must share Dirichlet sides");

    int nc = fine_map.components();
    int n_broken = 3 * coarse.n_triangles() * nc;

    // Pi: per coarse triangle solve the 3x3 Gram system against fine hats.
    // The Gram matrix is shared (uniform coarse mesh): |K|/12 * (1 + delta).
    Eigen::Matrix3d gram;
    gram << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    gram *= coarse.tri_area() / 12.0;
    Eigen::Matrix3d ginv = gram.inverse();

    Eigen::Matrix3d fine_mass;
    fine_mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    fine_mass *= fine.tri_area() / 12.0;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve((size_t)n_broken * 8);
    for (int K = 0; K < coarse.n_triangles(); ++K) {
        for (int ft : hier.children(K)) {
            auto tri = fine.triangle(ft);
            // lam(a, j): coarse hat a of K at fine vertex j of child ft
            Eigen::Matrix3d lam;
            for (int j = 0; j < 3; ++j) {
                auto b = hier.barycentric_in(K, tri[j]);
                for (int a = 0; a < 3; ++a) lam(a, j) = b[a];
            }
            // (T_K)_{a, vj} += sum_j' lam(a, j') Mloc(j', j); rows premultiplied
            // by ginv so duplicate-summing triplets assemble Pi directly
            Eigen::Matrix3d contrib = ginv * (lam * fine_mass);
            for (int j = 0; j < 3; ++j)
                for (int b = 0; b < 3; ++b) {
                    double v = contrib(b, j);
                    if (v == 0.0) continue;
                    for (int c = 0; c < nc; ++c) {
                        int col = fine_map.dof(tri[j], c);
                        if (col >= 0) trip.emplace_back((3 * K + b) * nc + c, col, v);
                    }
                }
        }
    }
    Interpolator out;
    out.broken.resize(n_broken, fine_map.n_dofs());
    out.broken.setFromTriplets(trip.begin(), trip.end());

    // E: average the traces over all coarse triangles containing the vertex
    trip.clear();
    for (int z = 0; z < coarse.n_vertices(); ++z) {
        if (coarse_map.constrained(z)) continue;
        auto star = coarse.vertex_star(z);
        double w = 1.0 / star.size();
        for (int K : star) {
            auto tri = coarse.triangle(K);
            int a = tri[0] == z ? 0 : (tri[1] == z ? 1 : 2);
            for (int c = 0; c < nc; ++c)
                trip.emplace_back(coarse_map.dof(z, c), (3 * K + a) * nc + c, w);
        }
    }
    out.averaging.resize(coarse_map.n_dofs(), n_broken);
    out.averaging.setFromTriplets(trip.begin(), trip.end());

    out.IH = out.averaging * out.broken;
    out.IH.prune(0.0);

    // prolongation: evaluate coarse hats at fine vertices (exact nesting)
    trip.clear();
    for (int fv = 0; fv < fine.n_vertices(); ++fv) {
        if (fine_map.constrained(fv)) continue;
        int ct = hier.enclosing_coarse_tri(fv);
        auto b = hier.barycentric_in(ct, fv);
        auto tri = coarse.triangle(ct);
        for (int a = 0; a < 3; ++a) {
            if (b[a] == 0.0) continue;
            int col0 = coarse_map.dof(tri[a]);
            if (col0 < 0) continue;
            for (int c = 0; c < nc; ++c)
                trip.emplace_back(fine_map.dof(fv, c), col0 + c, b[a]);
        }
    }
    out.P.resize(fine_map.n_dofs(), coarse_map.n_dofs());
    out.P.setFromTriplets(trip.begin(), trip.end());
    return out;
}

} // namespace lodthermo
