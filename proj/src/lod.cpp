#include "lodthermo/lod.hpp"

#include "lodthermo/errors.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

namespace lodthermo {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mutex;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

PatchSpace build_patch_space(const MeshHierarchy& hier, const DofMap& fine_map, int K, int k) {
    PatchSpace ps;
    ps.coarse_elems = coarse_patch(hier.coarse(), K, k);
    std::vector<char> in_patch(hier.fine().n_triangles(), 0);
    for (int ct : ps.coarse_elems)
        for (int ft : hier.children(ct)) {
            in_patch[ft] = 1;
            ps.fine_elems.push_back(ft);
        }
    std::sort(ps.fine_elems.begin(), ps.fine_elems.end());

    const TriMesh& fine = hier.fine();
    std::vector<char> vertex_ok(fine.n_vertices(), 0);
    for (int ft : ps.fine_elems)
        for (int v : fine.triangle(ft)) {
            if (vertex_ok[v]) continue;
            bool inside = true;
            for (int s : fine.vertex_star(v))
                if (!in_patch[s]) { inside = false; break; }
            vertex_ok[v] = inside ? 1 : 0;
        }
    for (int v = 0; v < fine.n_vertices(); ++v)
        if (vertex_ok[v] && !fine_map.constrained(v))
            for (int c = 0; c < fine_map.components(); ++c) ps.dofs.push_back(fine_map.dof(v, c));
    std::sort(ps.dofs.begin(), ps.dofs.end());
    return ps;
}

PatchSolver::PatchSolver(const SparseOperator& A, const SparseOperator& IH,
                         std::vector<int> dofs)
    : dofs_(std::move(dofs)) {
    int n = (int)dofs_.size();
    std::vector<int> local(A.rows(), -1);
    for (int i = 0; i < n; ++i) local[dofs_[i]] = i;

    // constraint rows: interpolation rows meeting the patch dofs
    std::vector<char> row_used(IH.rows(), 0);
    for (int g : dofs_)
        for (SparseOperator::InnerIterator it(IH, g); it; ++it) row_used[it.row()] = 1;
    std::vector<int> rows;
    for (int r = 0; r < IH.rows(); ++r)
        if (row_used[r]) rows.push_back(r);
    std::vector<int> row_local(IH.rows(), -1);
    for (int i = 0; i < (int)rows.size(); ++i) row_local[rows[i]] = i;
    n_constraints_ = (int)rows.size();

    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < n; ++j) {
        int g = dofs_[j];
        for (SparseOperator::InnerIterator it(A, g); it; ++it) {
            int li = local[it.row()];
            if (li >= 0) trip.emplace_back(li, j, it.value());
        }
        for (SparseOperator::InnerIterator it(IH, g); it; ++it) {
            int lr = row_local[it.row()];
            trip.emplace_back(n + lr, j, it.value());
            trip.emplace_back(j, n + lr, it.value());
        }
    }
    SparseOperator saddle(n + n_constraints_, n + n_constraints_);
    saddle.setFromTriplets(trip.begin(), trip.end());
    lu_.compute(saddle);
    if (lu_.info() != Eigen::Success)
        throw SolverError("patch saddle-point factorization failed (redundant constraints?)");
}

Eigen::VectorXd PatchSolver::solve_local(const Eigen::VectorXd& rhs_full) const {
    int n = (int)dofs_.size();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + n_constraints_);
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
        rhs[i] = rhs_full[dofs_[i]];
        nonzero |= rhs[i] != 0.0;
    }
    if (!nonzero) return Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) throw SolverError("patch saddle-point solve failed");
    return x.head(n);
}

std::vector<Eigen::SparseVector<double>> solve_patchwise(const MeshHierarchy& hier,
                                                         const DofMap& fine_map,
                                                         const Interpolator& interp,
                                                         const SparseOperator& A, int k,
                                                         int n_labels, const PatchSources& sources,
                                                         int threads) {
    int n_fine = fine_map.n_dofs();
    int nK = hier.coarse().n_triangles();
    std::vector<Eigen::SparseVector<double>> out(n_labels, Eigen::SparseVector<double>(n_fine));

    if (k == k_global) {
        std::vector<int> all(n_fine);
        for (int i = 0; i < n_fine; ++i) all[i] = i;
        PatchSolver solver(A, interp.IH, std::move(all));
        std::vector<Eigen::VectorXd> rhs(n_labels);
        for (int K = 0; K < nK; ++K)
            for (auto& [label, r] : sources(K)) {
                if (rhs[label].size() == 0) rhs[label] = Eigen::VectorXd::Zero(n_fine);
                rhs[label] += r;
            }
        for (int label = 0; label < n_labels; ++label) {
            if (rhs[label].size() == 0) continue;
            Eigen::VectorXd q = solver.solve_local(rhs[label]);
            for (int i = 0; i < n_fine; ++i) out[label].insertBack(i) = q[i];
        }
        return out;
    }

    struct Slot {
        std::vector<int> dofs;
        std::vector<std::pair<int, Eigen::VectorXd>> results;
    };
    std::vector<Slot> slots(nK);
    parallel_for(nK, threads, [&](int K) {
        auto src = sources(K);
        if (src.empty()) return;
        PatchSpace ps = build_patch_space(hier, fine_map, K, k);
        if (ps.dofs.empty()) return;
        PatchSolver solver(A, interp.IH, ps.dofs);
        Slot& slot = slots[K];
        for (auto& [label, r] : src) slot.results.emplace_back(label, solver.solve_local(r));
        slot.dofs = solver.dofs();
    });

    // ordered reduction: ascending K, then label order within K
    std::vector<Eigen::VectorXd> dense(n_labels);
    std::vector<std::vector<char>> support(n_labels);
    for (int K = 0; K < nK; ++K) {
        const Slot& slot = slots[K];
        for (auto& [label, vals] : slot.results) {
            if (dense[label].size() == 0) {
                dense[label] = Eigen::VectorXd::Zero(n_fine);
                support[label].assign(n_fine, 0);
            }
            for (size_t i = 0; i < slot.dofs.size(); ++i) {
                dense[label][slot.dofs[i]] += vals[i];
                support[label][slot.dofs[i]] = 1;
            }
        }
    }
    for (int label = 0; label < n_labels; ++label) {
        if (dense[label].size() == 0) continue;
        for (int i = 0; i < n_fine; ++i)
            if (support[label][i]) out[label].insertBack(i) = dense[label][i];
    }
    return out;
}

SparseOperator LodSpace::corrector_matrix(int n_fine) const {
    SparseOperator Q(n_fine, (int)correctors.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < (int)correctors.size(); ++j)
        for (Eigen::SparseVector<double>::InnerIterator it(correctors[j]); it; ++it)
            trip.emplace_back(it.index(), j, it.value());
    Q.setFromTriplets(trip.begin(), trip.end());
    return Q;
}

LodSpace build_lod_space(const MeshHierarchy& hier, const CoefficientField& coeff,
                         const DofMap& fine_map, const DofMap& coarse_map,
                         const Interpolator& interp, const SparseOperator& A, int k, int threads) {
    const TriMesh& fine = hier.fine();
    const TriMesh& coarse = hier.coarse();
    bool elastic = fine_map.field() == Field::vector2;

    auto prolonged_hat = [&](int cd) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(fine_map.n_dofs());
        for (SparseOperator::InnerIterator it(interp.P, cd); it; ++it) v[it.row()] = it.value();
        return v;
    };

    PatchSources sources = [&](int K) {
        std::vector<std::pair<int, Eigen::VectorXd>> out;
        auto children = hier.children(K);
        for (int z : coarse.triangle(K))
            for (int c = 0; c < coarse_map.components(); ++c) {
                int cd = coarse_map.dof(z, c);
                if (cd < 0) continue;
                Eigen::VectorXd hat = prolonged_hat(cd);
                Eigen::VectorXd rhs =
                    elastic ? apply_elasticity_on(fine, coeff, fine_map, children, hat)
                            : apply_thermal_on(fine, coeff, fine_map, children, hat);
                out.emplace_back(cd, std::move(rhs));
            }
        return out;
    };

    LodSpace space;
    space.k = k;
    space.correctors = solve_patchwise(hier, fine_map, interp, A, k, coarse_map.n_dofs(), sources,
                                       threads);
    space.basis = interp.P - space.corrector_matrix(fine_map.n_dofs());
    return space;
}

SparseOperator AlphaCorrection::as_matrix(int n_u_fine) const {
    SparseOperator X(n_u_fine, (int)columns.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < (int)columns.size(); ++j)
        for (Eigen::SparseVector<double>::InnerIterator it(columns[j]); it; ++it)
            trip.emplace_back(it.index(), j, it.value());
    X.setFromTriplets(trip.begin(), trip.end());
    return X;
}

AlphaCorrection build_alpha_correction(const MeshHierarchy& hier, const CoefficientField& coeff,
                                       const DofMap& u_fine_map, const DofMap& theta_fine_map,
                                       const Interpolator& u_interp, const SparseOperator& A_u,
                                       const SparseOperator& theta_basis, int k, int threads) {
    const TriMesh& fine = hier.fine();
    int n_labels = (int)theta_basis.cols();

    // label y touches K iff basis column y is nonzero at a vertex of K
    PatchSources sources = [&](int K) {
        auto children = hier.children(K);
        std::vector<char> mark(fine.n_vertices(), 0);
        for (int ft : children)
            for (int v : fine.triangle(ft)) mark[v] = 1;
        std::vector<std::pair<int, Eigen::VectorXd>> out;
        Eigen::VectorXd col = Eigen::VectorXd::Zero(theta_fine_map.n_dofs());
        for (int y = 0; y < n_labels; ++y) {
            bool touches = false;
            for (SparseOperator::InnerIterator it(theta_basis, y); it; ++it)
                if (mark[theta_fine_map.vertex_of((int)it.row())]) { touches = true; break; }
            if (!touches) continue;
            col.setZero();
            for (SparseOperator::InnerIterator it(theta_basis, y); it; ++it)
                col[it.row()] = it.value();
            Eigen::VectorXd rhs =
                apply_coupling_on(fine, coeff, u_fine_map, theta_fine_map, children, col);
            if (rhs.cwiseAbs().maxCoeff() == 0.0) continue;
            out.emplace_back(y, std::move(rhs));
        }
        return out;
    };

    AlphaCorrection corr;
    corr.k = k;
    corr.columns =
        solve_patchwise(hier, u_fine_map, u_interp, A_u, k, n_labels, sources, threads);
    return corr;
}

Eigen::VectorXd ms_ritz_project(const SparseOperator& A, const SparseOperator& basis,
                                const Eigen::VectorXd& v) {
    Eigen::MatrixXd S = Eigen::MatrixXd(basis.transpose() * (A * basis).eval());
    Eigen::VectorXd rhs = basis.transpose() * (A * v);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("multiscale Gram matrix factorization failed");
    return ldlt.solve(rhs);
}

std::uint32_t boundary_mask(const std::set<Side>& u_sides, const std::set<Side>& theta_sides) {
    std::uint32_t m = 0;
    for (Side s : u_sides) m |= 1u << (int)s;
    for (Side s : theta_sides) m |= 1u << (4 + (int)s);
    return m;
}

std::string CacheKey::file_name() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix((std::uint64_t)coarse_level);
    mix((std::uint64_t)fine_level);
    mix((std::uint64_t)(std::int64_t)k);
    mix((std::uint64_t)kind);
    mix(coeff_hash);
    mix((std::uint64_t)boundary_mask);
    char buf[40];
    std::snprintf(buf, sizeof buf, "lod_%c_%016" PRIx64 ".bin", kind, h);
    return buf;
}

namespace {
constexpr char kCacheMagic[8] = {'L', 'O', 'D', 'C', '0', '1', '\n', 0};
}

bool load_columns(const std::string& path, const CacheKey& key,
                  std::vector<Eigen::SparseVector<double>>& out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    char magic[8];
    CacheKey stored;
    std::int64_t ncols = 0, size = 0;
    f.read(magic, 8);
    f.read(reinterpret_cast<char*>(&stored), sizeof stored);
    f.read(reinterpret_cast<char*>(&ncols), 8);
    f.read(reinterpret_cast<char*>(&size), 8);
    if (!f || std::memcmp(magic, kCacheMagic, 8) != 0) return false;
    if (stored.coarse_level != key.coarse_level || stored.fine_level != key.fine_level ||
        stored.k != key.k || stored.kind != key.kind || stored.coeff_hash != key.coeff_hash ||
        stored.boundary_mask != key.boundary_mask)
        return false;
    out.assign(ncols, Eigen::SparseVector<double>(size));
    for (auto& col : out) {
        std::int64_t nnz = 0;
        f.read(reinterpret_cast<char*>(&nnz), 8);
        if (!f || nnz < 0 || nnz > size) return false;
        col.reserve(nnz);
        for (std::int64_t i = 0; i < nnz; ++i) {
            std::int32_t idx;
            double val;
            f.read(reinterpret_cast<char*>(&idx), 4);
            f.read(reinterpret_cast<char*>(&val), 8);
            if (!f) return false;
            col.insertBack(idx) = val;
        }
    }
    return (bool)f;
}

void save_columns(const std::string& path, const CacheKey& key,
                  const std::vector<Eigen::SparseVector<double>>& cols) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write cache file: " + path);
    f.write(kCacheMagic, 8);
    f.write(reinterpret_cast<const char*>(&key), sizeof key);
    std::int64_t ncols = (std::int64_t)cols.size();
    std::int64_t size = cols.empty() ? 0 : (std::int64_t)cols[0].size();
    f.write(reinterpret_cast<const char*>(&ncols), 8);
    f.write(reinterpret_cast<const char*>(&size), 8);
    for (const auto& col : cols) {
        std::int64_t nnz = col.nonZeros();
        f.write(reinterpret_cast<const char*>(&nnz), 8);
        for (Eigen::SparseVector<double>::InnerIterator it(col); it; ++it) {
            std::int32_t idx = (std::int32_t)it.index();
            double val = it.value();
            f.write(reinterpret_cast<const char*>(&idx), 4);
            f.write(reinterpret_cast<const char*>(&val), 8);
        }
    }
    if (!f) throw std::runtime_error("cache write failed: " + path);
}

} // namespace lodthermo
