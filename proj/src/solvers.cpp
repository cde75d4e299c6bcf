#include "lodthermo/solvers.hpp"

#include "lodthermo/errors.hpp"
#include "lodthermo/interpolation.hpp"

#include <Eigen/SparseLU>

namespace lodthermo {

ThermoLoads ThermoLoads::constants(const Eigen::Vector2d& f0, double g0, double theta0_scale) {
    return {
        [f0](double, double, double) { return f0; },
        [g0](double, double, double) { return g0; },
        [theta0_scale](double x, double y) { return theta0_scale * x * (1 - x) * y * (1 - y); },
    };
}

FineOperators FineOperators::build(const CoefficientField& coeff, const BoundaryConfig& bc) {
    TriMesh mesh(coeff.level());
    DofMap um(mesh, Field::vector2, bc.dirichlet_u);
    DofMap tm(mesh, Field::scalar, bc.dirichlet_theta);
    SparseOperator A_u = assemble_elasticity(mesh, coeff, um);
    SparseOperator A_t = assemble_thermal(mesh, coeff, tm);
    SparseOperator B = assemble_coupling(mesh, coeff, um, tm);
    SparseOperator M_t = assemble_mass(mesh, tm);
    return {mesh, coeff, std::move(um), std::move(tm), std::move(A_u), std::move(A_t),
            std::move(B), std::move(M_t)};
}

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite()) throw SolverError(std::string("non-finite state in ") + what);
}

/// block backward-Euler driver shared by the fine and restricted-coarse paths
History step_block(const SparseOperator& A_u, const SparseOperator& A_t, const SparseOperator& B,
                   const SparseOperator& M_t,
                   const std::function<Eigen::VectorXd(double)>& F,
                   const std::function<Eigen::VectorXd(double)>& G,
                   const Eigen::VectorXd& theta0, const TimeGrid& grid) {
    int nu = (int)A_u.rows(), nt = (int)A_t.rows();
    History h;
    h.grid = grid;

    Eigen::SparseLU<SparseOperator> lu_u(A_u);
    if (lu_u.info() != Eigen::Success)
        throw SolverError("elasticity factorization failed");
    Eigen::VectorXd u0 = lu_u.solve(Eigen::VectorXd(F(0.0) + B * theta0));
    require_finite(u0, "initial displacement");

    // saddle block [A_u -B; B^T M + tau A_t]
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A_u.nonZeros() + A_t.nonZeros() + 2 * B.nonZeros() + M_t.nonZeros());
    for (int kcol = 0; kcol < A_u.outerSize(); ++kcol)
        for (SparseOperator::InnerIterator it(A_u, kcol); it; ++it)
            trip.emplace_back((int)it.row(), (int)it.col(), it.value());
    for (int kcol = 0; kcol < B.outerSize(); ++kcol)
        for (SparseOperator::InnerIterator it(B, kcol); it; ++it) {
            trip.emplace_back((int)it.row(), nu + (int)it.col(), -it.value());
            trip.emplace_back(nu + (int)it.col(), (int)it.row(), it.value());
        }
    SparseOperator Mt_tauA = M_t + grid.tau * A_t;
    for (int kcol = 0; kcol < Mt_tauA.outerSize(); ++kcol)
        for (SparseOperator::InnerIterator it(Mt_tauA, kcol); it; ++it)
            trip.emplace_back(nu + (int)it.row(), nu + (int)it.col(), it.value());
    SparseOperator block(nu + nt, nu + nt);
    block.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SparseOperator> lu(block);
    if (lu.info() != Eigen::Success) throw SolverError("time-step block factorization failed");

    h.times.push_back(0.0);
    h.u.push_back(u0);
    h.theta.push_back(theta0);
    for (int n = 1; n <= grid.steps; ++n) {
        double t = grid.time(n);
        Eigen::VectorXd rhs(nu + nt);
        rhs.head(nu) = F(t);
        rhs.tail(nt) = grid.tau * G(t) + M_t * h.theta.back() + B.transpose() * h.u.back();
        Eigen::VectorXd x = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw SolverError("time-step solve failed");
        require_finite(x, "time step");
        h.times.push_back(t);
        h.u.push_back(x.head(nu));
        h.theta.push_back(x.tail(nt));
    }
    return h;
}

} // namespace

Eigen::VectorXd project_theta0(const FineOperators& ops, const ThermoLoads& loads) {
    Eigen::VectorXd rhs = assemble_scalar_load(ops.mesh, ops.tm, loads.theta0);
    Eigen::SparseLU<SparseOperator> lu(ops.M_t);
    if (lu.info() != Eigen::Success) throw SolverError("mass factorization failed");
    Eigen::VectorXd out = lu.solve(rhs);
    require_finite(out, "initial temperature projection");
    return out;
}

Eigen::VectorXd initial_displacement(const FineOperators& ops, const ThermoLoads& loads, double t,
                                     const Eigen::VectorXd& theta) {
    Eigen::VectorXd F = assemble_vector_load(
        ops.mesh, ops.um, [&](double x, double y) { return loads.f(x, y, t); });
    Eigen::SparseLU<SparseOperator> lu(ops.A_u);
    if (lu.info() != Eigen::Success) throw SolverError("elasticity factorization failed");
    Eigen::VectorXd out = lu.solve(Eigen::VectorXd(F + ops.B * theta));
    require_finite(out, "initial displacement");
    return out;
}

History solve_fine(const FineOperators& ops, const ThermoLoads& loads, const TimeGrid& grid) {
    auto F = [&](double t) {
        return assemble_vector_load(ops.mesh, ops.um,
                                    [&](double x, double y) { return loads.f(x, y, t); });
    };
    auto G = [&](double t) {
        return assemble_scalar_load(ops.mesh, ops.tm,
                                    [&](double x, double y) { return loads.g(x, y, t); });
    };
    return step_block(ops.A_u, ops.A_t, ops.B, ops.M_t, F, G, project_theta0(ops, loads), grid);
}

CoarseFemResult solve_coarse_fem(const FineOperators& ops, const MeshHierarchy& hier,
                                 const ThermoLoads& loads, const TimeGrid& grid) {
    if (hier.fine().level() != ops.mesh.level())
        throw std::invalid_argument("hierarchy fine level does not match the operators");
    if (hier.ratio() == 1) {
        History h = solve_fine(ops, loads, grid);
        return {h, h};
    }
    DofMap um_H(hier.coarse(), Field::vector2, ops.um.dirichlet_sides());
    DofMap tm_H(hier.coarse(), Field::scalar, ops.tm.dirichlet_sides());
    SparseOperator Pu = build_interpolator(hier, ops.um, um_H).P;
    SparseOperator Pt = build_interpolator(hier, ops.tm, tm_H).P;

    SparseOperator A_u = Pu.transpose() * (ops.A_u * Pu).eval();
    SparseOperator A_t = Pt.transpose() * (ops.A_t * Pt).eval();
    SparseOperator B = Pu.transpose() * (ops.B * Pt).eval();
    SparseOperator M_t = Pt.transpose() * (ops.M_t * Pt).eval();

    auto F = [&](double t) {
        return Eigen::VectorXd(Pu.transpose() *
                               assemble_vector_load(ops.mesh, ops.um, [&](double x, double y) {
                                   return loads.f(x, y, t);
                               }));
    };
    auto G = [&](double t) {
        return Eigen::VectorXd(Pt.transpose() *
                               assemble_scalar_load(ops.mesh, ops.tm, [&](double x, double y) {
                                   return loads.g(x, y, t);
                               }));
    };
    // L2 projection of theta0 onto the coarse space through the fine pairing
    Eigen::VectorXd rhs0 = Pt.transpose() * assemble_scalar_load(ops.mesh, ops.tm, loads.theta0);
    Eigen::SparseLU<SparseOperator> lu(M_t);
    if (lu.info() != Eigen::Success) throw SolverError("coarse mass factorization failed");
    Eigen::VectorXd theta0 = lu.solve(rhs0);

    CoarseFemResult out;
    out.coarse = step_block(A_u, A_t, B, M_t, F, G, theta0, grid);
    out.fine.grid = grid;
    out.fine.times = out.coarse.times;
    for (size_t n = 0; n < out.coarse.times.size(); ++n) {
        out.fine.u.push_back(Pu * out.coarse.u[n]);
        out.fine.theta.push_back(Pt * out.coarse.theta[n]);
    }
    return out;
}

GfemSystem build_gfem_system(const FineOperators& ops, const SparseOperator& Phi_u,
                             const SparseOperator& Phi_t, const SparseOperator* X) {
    GfemSystem sys;
    sys.Phi_u = Phi_u;
    sys.Phi_t = Phi_t;
    sys.S_uu = Eigen::MatrixXd(SparseOperator(Phi_u.transpose() * (ops.A_u * Phi_u).eval()));
    sys.C = Eigen::MatrixXd(SparseOperator(Phi_u.transpose() * (ops.B * Phi_t).eval()));
    sys.M_ms = Eigen::MatrixXd(SparseOperator(Phi_t.transpose() * (ops.M_t * Phi_t).eval()));
    sys.K_ms = Eigen::MatrixXd(SparseOperator(Phi_t.transpose() * (ops.A_t * Phi_t).eval()));
    int nct = (int)Phi_t.cols();
    if (X != nullptr && X->cols() > 0) {
        if (X->cols() != nct) throw std::invalid_argument("alpha columns disagree with theta basis");
        sys.X = *X;
        sys.S_uX = Eigen::MatrixXd(SparseOperator(Phi_u.transpose() * (ops.A_u * sys.X).eval()));
        sys.W = Eigen::MatrixXd(SparseOperator(Phi_t.transpose() * (ops.B.transpose() * sys.X).eval()));
        sys.corrected = true;
    } else {
        sys.X.resize(ops.um.n_dofs(), nct);
        sys.S_uX = Eigen::MatrixXd::Zero((int)Phi_u.cols(), nct);
        sys.W = Eigen::MatrixXd::Zero(nct, nct);
        sys.corrected = false;
    }
    return sys;
}

GfemHistory solve_gfem(const GfemSystem& sys, const FineOperators& ops, const ThermoLoads& loads,
                       const TimeGrid& grid) {
    int na = (int)sys.Phi_u.cols(), nb = (int)sys.Phi_t.cols();
    auto F_ms = [&](double t) {
        return Eigen::VectorXd(sys.Phi_u.transpose() *
                               assemble_vector_load(ops.mesh, ops.um, [&](double x, double y) {
                                   return loads.f(x, y, t);
                               }));
    };
    auto G_ms = [&](double t) {
        return Eigen::VectorXd(sys.Phi_t.transpose() *
                               assemble_scalar_load(ops.mesh, ops.tm, [&](double x, double y) {
                                   return loads.g(x, y, t);
                               }));
    };

    // initial data: energy projection of the projected theta0, then reduced
    // equilibrium for the displacement
    Eigen::VectorXd theta0_h = project_theta0(ops, loads);
    Eigen::LDLT<Eigen::MatrixXd> kms(sys.K_ms);
    if (kms.info() != Eigen::Success) throw SolverError("reduced conductivity factorization failed");
    Eigen::VectorXd b0 = kms.solve(sys.Phi_t.transpose() * (ops.A_t * theta0_h));
    Eigen::LDLT<Eigen::MatrixXd> suu(sys.S_uu);
    if (suu.info() != Eigen::Success) throw SolverError("reduced elasticity factorization failed");
    Eigen::VectorXd a0 = suu.solve(F_ms(0.0) + sys.C * b0 - sys.S_uX * b0);
    require_finite(a0, "reduced initial state");
    require_finite(b0, "reduced initial state");

    Eigen::MatrixXd step(na + nb, na + nb);
    step.topLeftCorner(na, na) = sys.S_uu;
    step.topRightCorner(na, nb) = sys.S_uX - sys.C;
    step.bottomLeftCorner(nb, na) = sys.C.transpose();
    step.bottomRightCorner(nb, nb) = sys.W + sys.M_ms + grid.tau * sys.K_ms;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(step);

    GfemHistory h;
    h.grid = grid;
    auto push = [&](double t, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        h.times.push_back(t);
        h.a.push_back(a);
        h.b.push_back(b);
        Eigen::VectorXd u = sys.Phi_u * a;
        if (sys.corrected) u += sys.X * b;
        h.u.push_back(std::move(u));
        h.theta.push_back(sys.Phi_t * b);
    };
    push(0.0, a0, b0);
    for (int n = 1; n <= grid.steps; ++n) {
        double t = grid.time(n);
        Eigen::VectorXd rhs(na + nb);
        rhs.head(na) = F_ms(t);
        rhs.tail(nb) = grid.tau * G_ms(t) + (sys.M_ms + sys.W) * h.b.back() +
                       sys.C.transpose() * h.a.back();
        Eigen::VectorXd x = lu.solve(rhs);
        require_finite(x, "reduced time step");
        push(t, x.head(na), x.tail(nb));
    }
    return h;
}

std::pair<double, double> scheme_residual(const FineOperators& ops, const ThermoLoads& loads,
                                          const History& h) {
    double r1 = 0, r2 = 0;
    for (size_t n = 1; n < h.times.size(); ++n) {
        double t = h.times[n];
        Eigen::VectorXd F = assemble_vector_load(
            ops.mesh, ops.um, [&](double x, double y) { return loads.f(x, y, t); });
        Eigen::VectorXd G = assemble_scalar_load(
            ops.mesh, ops.tm, [&](double x, double y) { return loads.g(x, y, t); });
        Eigen::VectorXd e1 = ops.A_u * h.u[n] - ops.B * h.theta[n] - F;
        Eigen::VectorXd e2 = ops.M_t * (h.theta[n] - h.theta[n - 1]) +
                             h.grid.tau * (ops.A_t * h.theta[n]) +
                             ops.B.transpose() * (h.u[n] - h.u[n - 1]) - h.grid.tau * G;
        r1 = std::max(r1, e1.norm());
        r2 = std::max(r2, e2.norm());
    }
    return {r1, r2};
}

} // namespace lodthermo
