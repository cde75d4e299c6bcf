#pragma once

#include "lodthermo/assembly.hpp"

namespace lodthermo {

/// Quasi-interpolation I_H = E ∘ Pi from the fine space onto coarse P1:
/// Pi projects elementwise (L2) onto linears per coarse triangle, E averages
/// the resulting vertex traces with weight 1/card{K : z in K}.  All three
/// maps act on free dofs; Dirichlet coarse rows are dropped.
///
/// Broken (elementwise) coefficients are indexed (3*K + a)*ncomp + c for
/// coarse triangle K, local vertex a, component c; the coefficient equals the
/// trace value of the projection at that vertex.
struct Interpolator {
    SparseOperator broken;     ///< Pi: broken coefficients x fine free dofs
    SparseOperator averaging;  ///< E: coarse free dofs x broken coefficients
    SparseOperator IH;         ///< E * Pi
    SparseOperator P;          ///< prolongation: fine free dofs x coarse free dofs

    int n_coarse() const { return (int)IH.rows(); }
    int n_fine() const { return (int)IH.cols(); }
};

/// Builds the operators for one field.  The fine and coarse maps must carry
/// the same field and the same Dirichlet sides.
Interpolator build_interpolator(const MeshHierarchy&, const DofMap& fine_map,
                                const DofMap& coarse_map);

} // namespace lodthermo
