#pragma once

#include "lodthermo/coefficients.hpp"
#include "lodthermo/interpolation.hpp"

#include <Eigen/SparseLU>
#include <cstdint>
#include <functional>
#include <memory>

namespace lodthermo {

/// Patch width sentinel: unlocalized (whole-domain) corrector problems.
inline constexpr int k_global = -1;

/// Run body(0..n-1) on a worker pool; results must go into per-index slots so
/// any later reduction is order-deterministic regardless of thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

/// Element patch omega_k(K) together with its conforming fine dof set: a free
/// fine dof belongs to the patch space iff its whole vertex star lies inside
/// the patch (zero trace on the interior patch boundary; dofs on the domain
/// boundary keep their global free/fixed status).
struct PatchSpace {
    std::vector<int> coarse_elems;  ///< ascending
    std::vector<int> fine_elems;    ///< ascending union of children
    std::vector<int> dofs;          ///< ascending global fine free dofs
};

PatchSpace build_patch_space(const MeshHierarchy&, const DofMap& fine_map, int K, int k);

/// Energy minimization over a patch subject to vanishing quasi-interpolation,
/// realized as the saddle-point system [A_pp C^T; C 0] and factored once with
/// sparse LU (the block is symmetric indefinite, so no Cholesky).  Constraint
/// rows are the interpolation rows with support among the patch dofs; the
/// remaining rows hold automatically.
class PatchSolver {
public:
    PatchSolver(const SparseOperator& A, const SparseOperator& IH, std::vector<int> dofs);

    /// Restricts rhs to the patch, solves, and returns the local values
    /// (aligned with dofs()).  Zero restricted rhs short-circuits to zero.
    Eigen::VectorXd solve_local(const Eigen::VectorXd& rhs_full) const;

    const std::vector<int>& dofs() const { return dofs_; }
    int n_constraints() const { return n_constraints_; }

private:
    std::vector<int> dofs_;
    int n_constraints_;
    Eigen::SparseLU<SparseOperator> lu_;
};

/// Labeled patch sources for coarse element K: list of (label, full-size rhs).
using PatchSources = std::function<std::vector<std::pair<int, Eigen::VectorXd>>(int K)>;

/// Runs the corrector machinery: for every coarse element K solve the
/// constrained patch problem for each source, then accumulate per label over
/// ascending K.  k = k_global solves one whole-domain system per label with
/// the summed sources (equivalent by linearity).  Columns keep structural
/// zeros outside the union of contributing patch dof sets.
std::vector<Eigen::SparseVector<double>> solve_patchwise(
    const MeshHierarchy&, const DofMap& fine_map, const Interpolator&, const SparseOperator& A,
    int k, int n_labels, const PatchSources& sources, int threads);

/// Correctors and the corrected basis Phi = P - Q for one field; column z of
/// Q is the localized corrector of the prolonged coarse hat z.
struct LodSpace {
    int k = k_global;
    std::vector<Eigen::SparseVector<double>> correctors;  ///< per coarse free dof
    SparseOperator basis;                                 ///< fine free x coarse free

    SparseOperator corrector_matrix(int n_fine) const;
};

/// Field picked from the dof maps: vector2 -> elasticity form, scalar ->
/// thermal form.
LodSpace build_lod_space(const MeshHierarchy&, const CoefficientField&, const DofMap& fine_map,
                         const DofMap& coarse_map, const Interpolator&, const SparseOperator& A,
                         int k, int threads);

/// Displacement corrections driven by the multiscale temperature basis: one
/// column per coarse temperature dof y, X_y = sum_K x_y^K with x_y^K solving
/// the elasticity patch problem against the element-restricted thermal
/// coupling of basis column y.
struct AlphaCorrection {
    int k = k_global;
    std::vector<Eigen::SparseVector<double>> columns;  ///< u-fine-sized

    SparseOperator as_matrix(int n_u_fine) const;
};

AlphaCorrection build_alpha_correction(const MeshHierarchy&, const CoefficientField&,
                                       const DofMap& u_fine_map, const DofMap& theta_fine_map,
                                       const Interpolator& u_interp, const SparseOperator& A_u,
                                       const SparseOperator& theta_basis, int k, int threads);

/// Energy (Ritz) projection onto the span of the basis columns:
/// returns c with (Phi^T A Phi) c = Phi^T A v.
Eigen::VectorXd ms_ritz_project(const SparseOperator& A, const SparseOperator& basis,
                                const Eigen::VectorXd& v);

// --- corrector cache ---

struct CacheKey {
    int coarse_level = 0;
    int fine_level = 0;
    int k = 0;
    char kind = 'u';  ///< 'u' elasticity, 't' thermal, 'a' alpha columns
    std::uint64_t coeff_hash = 0;
    std::uint32_t boundary_mask = 0;  ///< u sides | theta sides << 4

    std::string file_name() const;  ///< stable content-derived name
};

std::uint32_t boundary_mask(const std::set<Side>& u_sides, const std::set<Side>& theta_sides);

/// Returns false if the file is missing or the key disagrees.
bool load_columns(const std::string& path, const CacheKey&,
                  std::vector<Eigen::SparseVector<double>>& out);
void save_columns(const std::string& path, const CacheKey&,
                  const std::vector<Eigen::SparseVector<double>>& cols);

} // namespace lodthermo
