#pragma once

#include "lodthermo/assembly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lodthermo {

/// ||grad v||_{L2(Omega)}; Frobenius norm of the gradient for vector2 fields.
/// Exact for P1 (gradients are elementwise constant).  Constrained vertices
/// contribute their homogeneous value 0.
double h1_seminorm(const TriMesh&, const DofMap&, const Eigen::VectorXd& v);

/// ||v||_{L2(Omega)} via the exact P1 mass pairing.
double l2_norm(const TriMesh&, const DofMap&, const Eigen::VectorXd& v);

/// Full H1 norm sqrt(L2^2 + seminorm^2).
double h1_norm(const TriMesh&, const DofMap&, const Eigen::VectorXd& v);

/// Relative H1-seminorm error ||grad(v - ref)|| / ||grad ref||; both on the
/// same mesh/dof map.  Zero reference with zero error reports 0.
double relative_h1_error(const TriMesh&, const DofMap&, const Eigen::VectorXd& v,
                         const Eigen::VectorXd& ref);

/// Experimental order log(e_coarse/e_fine) / log(H_coarse/H_fine).
double eoc(double e_coarse, double e_fine, double H_coarse, double H_fine);

/// One convergence-table row.
struct LevelRecord {
    int coarse_level = 0;
    double H = 0;
    int k = 0;
    double rel_err_u = 0;
    double rel_err_theta = 0;
    double wall_time_s = 0;
};

/// Attaches EOCs to consecutive rows and renders
/// "H,k,rel_err_u,rel_err_theta,eoc_u,eoc_theta,wall_time_s" CSV
/// (first row's EOC cells empty).  Formatting is locale-free %.12g.
std::string convergence_csv(const std::vector<LevelRecord>& rows);

/// Mean EOC over consecutive pairs of the given error column.
double mean_eoc(const std::vector<LevelRecord>& rows, bool theta);

/// Per-step history export: "n,t,u_norm,theta_norm" with Euclidean dof norms.
std::string history_csv(const std::vector<double>& times,
                        const std::vector<Eigen::VectorXd>& u,
                        const std::vector<Eigen::VectorXd>& theta);

/// Writes text to path atomically enough for our purposes; throws on failure.
void write_file(const std::string& path, const std::string& text);

} // namespace lodthermo
