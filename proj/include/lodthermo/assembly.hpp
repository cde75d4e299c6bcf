#pragma once

#include "lodthermo/coefficients.hpp"
#include "lodthermo/mesh.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <set>
#include <vector>

namespace lodthermo {

using SparseOperator = Eigen::SparseMatrix<double>;

/// Which sides carry homogeneous Dirichlet conditions for each field.
struct BoundaryConfig {
    std::set<Side> dirichlet_u;
    std::set<Side> dirichlet_theta;

    static BoundaryConfig clamped_bottom_theta_all();  ///< u fixed at bottom, theta on all sides
    static BoundaryConfig all_dirichlet();             ///< both fields fixed on the whole boundary
};

enum class Field { scalar, vector2 };

/// Mapping mesh vertices -> free dof ids with Dirichlet vertices eliminated.
/// vector2 dofs are vertex-major: vertex v maps to (2 slots) x then y; a
/// Dirichlet vertex is constrained in both components.
class DofMap {
public:
    DofMap(const TriMesh& mesh, Field field, const std::set<Side>& dirichlet_sides);

    Field field() const { return field_; }
    int components() const { return field_ == Field::vector2 ? 2 : 1; }
    int n_dofs() const { return n_dofs_; }
    int n_vertices() const { return (int)first_dof_.size(); }

    /// First dof of vertex v, or -1 if constrained.
    int dof(int v) const { return first_dof_[v]; }
    int dof(int v, int comp) const {
        int d = first_dof_[v];
        return d < 0 ? -1 : d + comp;
    }
    bool constrained(int v) const { return first_dof_[v] < 0; }
    int vertex_of(int dof) const { return vertex_of_dof_[dof]; }
    int comp_of(int dof) const { return field_ == Field::vector2 ? dof % 2 : 0; }

    const std::set<Side>& dirichlet_sides() const { return sides_; }

private:
    Field field_;
    std::set<Side> sides_;
    std::vector<int> first_dof_;
    std::vector<int> vertex_of_dof_;
    int n_dofs_;
};

// --- global operators on free dofs (rows/cols of constrained dofs eliminated;
// --- homogeneous data, so no lifting terms arise) ---

/// (sigma(u) : eps(v)) with sigma = 2 mu eps + lambda tr(eps) I.
SparseOperator assemble_elasticity(const TriMesh&, const CoefficientField&, const DofMap& u_map);

/// (kappa grad theta, grad v).
SparseOperator assemble_thermal(const TriMesh&, const CoefficientField&, const DofMap& theta_map);

/// Coupling B with B(i,j) = (alpha phi_j^theta, div phi_i^u); rows are u dofs.
SparseOperator assemble_coupling(const TriMesh&, const CoefficientField&, const DofMap& u_map,
                                 const DofMap& theta_map);

/// L2 mass matrix for the map's field (vector2: block-diagonal per component).
SparseOperator assemble_mass(const TriMesh&, const DofMap&);

/// Load vector (I_h g, phi_i): data interpolated at mesh vertices, then paired
/// exactly against P1 test functions.
Eigen::VectorXd assemble_scalar_load(const TriMesh&, const DofMap& theta_map,
                                     const std::function<double(double, double)>& g);
Eigen::VectorXd assemble_vector_load(const TriMesh&, const DofMap& u_map,
                                     const std::function<Eigen::Vector2d(double, double)>& f);

/// Vertex interpolant of data as a free-dof vector (Dirichlet values dropped).
Eigen::VectorXd interpolate_scalar(const TriMesh&, const DofMap&,
                                   const std::function<double(double, double)>&);
Eigen::VectorXd interpolate_vector(const TriMesh&, const DofMap&,
                                   const std::function<Eigen::Vector2d(double, double)>&);

// --- element-restricted applications (for patch-local right-hand sides) ---

/// y += (elasticity form restricted to elems) * x, full-length vectors.
Eigen::VectorXd apply_elasticity_on(const TriMesh&, const CoefficientField&, const DofMap& u_map,
                                    const std::vector<int>& elems, const Eigen::VectorXd& x);
Eigen::VectorXd apply_thermal_on(const TriMesh&, const CoefficientField&, const DofMap& theta_map,
                                 const std::vector<int>& elems, const Eigen::VectorXd& x);
/// Coupling restricted to elems applied to a theta vector; result is u-sized.
Eigen::VectorXd apply_coupling_on(const TriMesh&, const CoefficientField&, const DofMap& u_map,
                                  const DofMap& theta_map, const std::vector<int>& elems,
                                  const Eigen::VectorXd& theta);

/// Coordinate-format dump, "row col value" per line, row-major sorted.
std::string dump_operator(const SparseOperator&);

} // namespace lodthermo
