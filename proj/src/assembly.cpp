#include "lodthermo/assembly.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace lodthermo {

BoundaryConfig BoundaryConfig::clamped_bottom_theta_all() {
    return {{Side::bottom}, {Side::bottom, Side::right, Side::top, Side::left}};
}

BoundaryConfig BoundaryConfig::all_dirichlet() {
    std::set<Side> all{Side::bottom, Side::right, Side::top, Side::left};
    return {all, all};
}

DofMap::DofMap(const TriMesh& mesh, Field field, const std::set<Side>& dirichlet_sides)
    : field_(field), sides_(dirichlet_sides) {
    int nv = mesh.n_vertices();
    first_dof_.assign(nv, -1);
    int next = 0;
    for (int v = 0; v < nv; ++v) {
        bool fixed = false;
        for (Side s : sides_)
            if (mesh.on_side(v, s)) { fixed = true; break; }
        if (fixed) continue;
        first_dof_[v] = next;
        next += components();
    }
    n_dofs_ = next;
    vertex_of_dof_.resize(n_dofs_);
    for (int v = 0; v < nv; ++v)
        if (first_dof_[v] >= 0)
            for (int c = 0; c < components(); ++c) vertex_of_dof_[first_dof_[v] + c] = v;
}

namespace {

/// local P1 mass matrix scaled by element area
Eigen::Matrix3d local_mass(double area) {
    Eigen::Matrix3d m;
    m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    return m * (area / 12.0);
}

/// 6x6 elasticity element matrix, dof order (v0x, v0y, v1x, v1y, v2x, v2y):
/// area * ( mu [delta_cd gi.gj + gi_d gj_c] + lambda gi_c gj_d )
Eigen::Matrix<double, 6, 6> local_elasticity(const std::array<Eigen::Vector2d, 3>& g, double area,
                                             double mu, double lambda) {
    Eigen::Matrix<double, 6, 6> ke;
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 2; ++c)
            for (int j = 0; j < 3; ++j)
                for (int d = 0; d < 2; ++d) {
                    double val = mu * ((c == d ? g[i].dot(g[j]) : 0.0) + g[i][d] * g[j][c]) +
                                 lambda * g[i][c] * g[j][d];
                    ke(2 * i + c, 2 * j + d) = area * val;
                }
    return ke;
}

Eigen::Matrix3d local_thermal(const std::array<Eigen::Vector2d, 3>& g, double area,
                              const Eigen::Matrix2d& kappa) {
    Eigen::Matrix3d kt;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) kt(i, j) = area * g[i].dot(kappa * g[j]);
    return kt;
}

using Triplet = Eigen::Triplet<double>;

} // namespace

SparseOperator assemble_elasticity(const TriMesh& mesh, const CoefficientField& coeff,
                                   const DofMap& um) {
    std::vector<Triplet> trip;
    trip.reserve(36 * mesh.n_triangles());
    double area = mesh.tri_area();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        auto ke = local_elasticity(mesh.gradients(t), area, coeff.mu(t), coeff.lambda(t));
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 2; ++c) {
                int gi = um.dof(tri[i], c);
                if (gi < 0) continue;
                for (int j = 0; j < 3; ++j)
                    for (int d = 0; d < 2; ++d) {
                        int gj = um.dof(tri[j], d);
                        if (gj >= 0) trip.emplace_back(gi, gj, ke(2 * i + c, 2 * j + d));
                    }
            }
    }
    SparseOperator A(um.n_dofs(), um.n_dofs());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

SparseOperator assemble_thermal(const TriMesh& mesh, const CoefficientField& coeff,
                                const DofMap& tm) {
    std::vector<Triplet> trip;
    trip.reserve(9 * mesh.n_triangles());
    double area = mesh.tri_area();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        auto kt = local_thermal(mesh.gradients(t), area, coeff.kappa(t));
        for (int i = 0; i < 3; ++i) {
            int gi = tm.dof(tri[i]);
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                int gj = tm.dof(tri[j]);
                if (gj >= 0) trip.emplace_back(gi, gj, kt(i, j));
            }
        }
    }
    SparseOperator A(tm.n_dofs(), tm.n_dofs());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

SparseOperator assemble_coupling(const TriMesh& mesh, const CoefficientField& coeff,
                                 const DofMap& um, const DofMap& tm) {
    // (alpha theta_j, div phi_ic) = alpha * g_i[c] * int_T lambda_j
    std::vector<Triplet> trip;
    trip.reserve(18 * mesh.n_triangles());
    double third_area = mesh.tri_area() / 3.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        auto g = mesh.gradients(t);
        double w = coeff.alpha(t) * third_area;
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 2; ++c) {
                int gi = um.dof(tri[i], c);
                if (gi < 0) continue;
                for (int j = 0; j < 3; ++j) {
                    int gj = tm.dof(tri[j]);
                    if (gj >= 0) trip.emplace_back(gi, gj, w * g[i][c]);
                }
            }
    }
    SparseOperator B(um.n_dofs(), tm.n_dofs());
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

SparseOperator assemble_mass(const TriMesh& mesh, const DofMap& dm) {
    std::vector<Triplet> trip;
    int nc = dm.components();
    trip.reserve(9 * nc * mesh.n_triangles());
    auto ml = local_mass(mesh.tri_area());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int c = 0; c < nc; ++c) {
                    int gi = dm.dof(tri[i], c), gj = dm.dof(tri[j], c);
                    if (gi >= 0 && gj >= 0) trip.emplace_back(gi, gj, ml(i, j));
                }
    }
    SparseOperator M(dm.n_dofs(), dm.n_dofs());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::VectorXd assemble_scalar_load(const TriMesh& mesh, const DofMap& tm,
                                     const std::function<double(double, double)>& g) {
    // pair the vertex interpolant of g (all vertices) against free test hats
    Eigen::VectorXd nodal(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        auto p = mesh.vertex(v);
        nodal[v] = g(p.x(), p.y());
    }
    Eigen::VectorXd load = Eigen::VectorXd::Zero(tm.n_dofs());
    auto ml = local_mass(mesh.tri_area());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        for (int i = 0; i < 3; ++i) {
            int gi = tm.dof(tri[i]);
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) load[gi] += ml(i, j) * nodal[tri[j]];
        }
    }
    return load;
}

Eigen::VectorXd assemble_vector_load(const TriMesh& mesh, const DofMap& um,
                                     const std::function<Eigen::Vector2d(double, double)>& f) {
    Eigen::MatrixX2d nodal(mesh.n_vertices(), 2);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        auto p = mesh.vertex(v);
        nodal.row(v) = f(p.x(), p.y()).transpose();
    }
    Eigen::VectorXd load = Eigen::VectorXd::Zero(um.n_dofs());
    auto ml = local_mass(mesh.tri_area());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 2; ++c) {
                int gi = um.dof(tri[i], c);
                if (gi < 0) continue;
                for (int j = 0; j < 3; ++j) load[gi] += ml(i, j) * nodal(tri[j], c);
            }
    }
    return load;
}

Eigen::VectorXd interpolate_scalar(const TriMesh& mesh, const DofMap& dm,
                                   const std::function<double(double, double)>& g) {
    Eigen::VectorXd v(dm.n_dofs());
    for (int d = 0; d < dm.n_dofs(); ++d) {
        auto p = mesh.vertex(dm.vertex_of(d));
        v[d] = g(p.x(), p.y());
    }
    return v;
}

Eigen::VectorXd interpolate_vector(const TriMesh& mesh, const DofMap& dm,
                                   const std::function<Eigen::Vector2d(double, double)>& f) {
    Eigen::VectorXd v(dm.n_dofs());
    for (int d = 0; d < dm.n_dofs(); d += 2) {
        auto p = mesh.vertex(dm.vertex_of(d));
        v.segment<2>(d) = f(p.x(), p.y());
    }
    return v;
}

Eigen::VectorXd apply_elasticity_on(const TriMesh& mesh, const CoefficientField& coeff,
                                    const DofMap& um, const std::vector<int>& elems,
                                    const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(um.n_dofs());
    double area = mesh.tri_area();
    for (int t : elems) {
        auto tri = mesh.triangle(t);
        auto ke = local_elasticity(mesh.gradients(t), area, coeff.mu(t), coeff.lambda(t));
        double xl[6], yl[6] = {0, 0, 0, 0, 0, 0};
        for (int j = 0; j < 3; ++j)
            for (int d = 0; d < 2; ++d) {
                int gj = um.dof(tri[j], d);
                xl[2 * j + d] = gj >= 0 ? x[gj] : 0.0;
            }
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) yl[a] += ke(a, b) * xl[b];
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 2; ++c) {
                int gi = um.dof(tri[i], c);
                if (gi >= 0) y[gi] += yl[2 * i + c];
            }
    }
    return y;
}

Eigen::VectorXd apply_thermal_on(const TriMesh& mesh, const CoefficientField& coeff,
                                 const DofMap& tm, const std::vector<int>& elems,
                                 const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(tm.n_dofs());
    double area = mesh.tri_area();
    for (int t : elems) {
        auto tri = mesh.triangle(t);
        auto kt = local_thermal(mesh.gradients(t), area, coeff.kappa(t));
        for (int i = 0; i < 3; ++i) {
            int gi = tm.dof(tri[i]);
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                int gj = tm.dof(tri[j]);
                if (gj >= 0) y[gi] += kt(i, j) * x[gj];
            }
        }
    }
    return y;
}

Eigen::VectorXd apply_coupling_on(const TriMesh& mesh, const CoefficientField& coeff,
                                  const DofMap& um, const DofMap& tm,
                                  const std::vector<int>& elems, const Eigen::VectorXd& theta) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(um.n_dofs());
    double third_area = mesh.tri_area() / 3.0;
    for (int t : elems) {
        auto tri = mesh.triangle(t);
        auto g = mesh.gradients(t);
        double w = coeff.alpha(t) * third_area;
        double tsum = 0;
        for (int j = 0; j < 3; ++j) {
            int gj = tm.dof(tri[j]);
            if (gj >= 0) tsum += theta[gj];
        }
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 2; ++c) {
                int gi = um.dof(tri[i], c);
                if (gi >= 0) y[gi] += w * g[i][c] * tsum;
            }
    }
    return y;
}

std::string dump_operator(const SparseOperator& A) {
    struct Entry {
        int r, c;
        double v;
    };
    std::vector<Entry> entries;
    entries.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(A, k); it; ++it)
            entries.push_back({(int)it.row(), (int)it.col(), it.value()});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    std::ostringstream os;
    char buf[96];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.r, e.c, e.v);
        os << buf;
    }
    return os.str();
}

} // namespace lodthermo
