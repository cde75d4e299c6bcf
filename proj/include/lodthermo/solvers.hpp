#pragma once

#include "lodthermo/analysis.hpp"
#include "lodthermo/lod.hpp"

namespace lodthermo {

/// Uniform backward-Euler grid: t_n = n*tau, n = 0..steps.
struct TimeGrid {
    double tau = 0.05;
    int steps = 20;

    double time(int n) const { return tau * n; }
    double T() const { return tau * steps; }
};

/// Problem data: body force f(x,y,t), heat source g(x,y,t), initial
/// temperature theta0(x,y).  The initial displacement is determined by the
/// equilibrium equation at t=0.
struct ThermoLoads {
    std::function<Eigen::Vector2d(double, double, double)> f;
    std::function<double(double, double, double)> g;
    std::function<double(double, double)> theta0;

    static ThermoLoads constants(const Eigen::Vector2d& f0, double g0, double theta0_scale);
};

/// Assembled fine-scale operators for one mesh/coefficients/boundary setup.
struct FineOperators {
    TriMesh mesh;
    CoefficientField coeff;
    DofMap um, tm;
    SparseOperator A_u;  ///< elasticity
    SparseOperator A_t;  ///< conductivity
    SparseOperator B;    ///< coupling, u rows x theta cols
    SparseOperator M_t;  ///< temperature mass

    static FineOperators build(const CoefficientField&, const BoundaryConfig&);
};

/// Dof-vector trajectories; index 0 is the initial state.
struct History {
    TimeGrid grid;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> u;
    std::vector<Eigen::VectorXd> theta;
};

/// L2 projection of theta0 onto the free temperature space (mass solve).
Eigen::VectorXd project_theta0(const FineOperators&, const ThermoLoads&);

/// Equilibrium displacement for a given temperature: A_u u = F(t) + B theta.
Eigen::VectorXd initial_displacement(const FineOperators&, const ThermoLoads&, double t,
                                     const Eigen::VectorXd& theta);

/// Reference fine-scale solver: monolithic backward-Euler block steps
///   [A_u  -B     ] [u^n]   [F^n]
///   [B^T  M+tau*A_t] [th^n] = [tau*G^n + M th^{n-1} + B^T u^{n-1}],
/// one sparse LU factorization reused across steps.
History solve_fine(const FineOperators&, const ThermoLoads&, const TimeGrid&);

/// Standard P1 FEM on the coarse mesh via Galerkin restriction of the fine
/// system (exact integration of the multiscale coefficients through nesting).
/// `coarse` holds coarse-dof trajectories, `fine` their prolongations.
struct CoarseFemResult {
    History coarse;
    History fine;
};
CoarseFemResult solve_coarse_fem(const FineOperators&, const MeshHierarchy&, const ThermoLoads&,
                                 const TimeGrid&);

/// Reduced generalized-FEM system over the multiscale bases.  X carries the
/// temperature-driven displacement corrections (empty => uncorrected variant).
struct GfemSystem {
    SparseOperator Phi_u, Phi_t, X;
    Eigen::MatrixXd S_uu;   ///< Phi_u' A_u Phi_u
    Eigen::MatrixXd S_uX;   ///< Phi_u' A_u X
    Eigen::MatrixXd C;      ///< Phi_u' B Phi_t
    Eigen::MatrixXd W;      ///< Phi_t' B' X
    Eigen::MatrixXd M_ms;   ///< Phi_t' M Phi_t
    Eigen::MatrixXd K_ms;   ///< Phi_t' A_t Phi_t
    bool corrected = false;
};
GfemSystem build_gfem_system(const FineOperators&, const SparseOperator& Phi_u,
                             const SparseOperator& Phi_t, const SparseOperator* X);

/// Multiscale trajectories: reduced coefficients (a, b) plus fine-space
/// expansions u = Phi_u a + X b and theta = Phi_t b.
struct GfemHistory {
    TimeGrid grid;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> a, b;
    std::vector<Eigen::VectorXd> u, theta;
};

/// Backward-Euler in the reduced space.  Initial temperature is the energy
/// projection of the fine L2-projected theta0; initial displacement solves
/// the reduced equilibrium equation.
GfemHistory solve_gfem(const GfemSystem&, const FineOperators&, const ThermoLoads&,
                       const TimeGrid&);

/// Max over steps of the two discrete equation residuals (Euclidean norms of
/// the assembled residual vectors, time-scaled form for the heat row).
std::pair<double, double> scheme_residual(const FineOperators&, const ThermoLoads&,
                                          const History&);

} // namespace lodthermo
