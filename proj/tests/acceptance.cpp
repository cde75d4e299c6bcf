// End-to-end acceptance gate.  Each check prints exactly one PASS/FAIL line
// with the measured quantities and the tolerance pinned in its code; the
// process exits nonzero if any check fails.  Runtime limits are enforced.

#include "lodthermo/runner.hpp"

#include "manufactured.hpp"

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>

using namespace lodthermo;

namespace {

int failures = 0;

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int num, const char* name, bool ok, double secs, double limit_s,
            const std::string& detail) {
    if (secs >= limit_s) ok = false;
    std::printf("criterion %d %-32s %s (%s; %.1fs of %.0fs budget)\n", num, name,
                ok ? "PASS" : "FAIL", detail.c_str(), secs, limit_s);
    std::fflush(stdout);
    if (!ok) ++failures;
}

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(-1, 1);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = U(rng);
    return v;
}

CoefficientField benchmark_field(int level, int raster_n) {
    return CoefficientField::two_phase(level, composite_inclusions_raster(raster_n),
                                       {1, 1, 1, 1}, {10, 50, 10, 10});
}

// interpolation is a projection onto the coarse space: applying it to the
// prolonged coarse part must reproduce the coarse part exactly
void criterion1() {
    Timer t;
    const double tol = 1e-12;
    MeshHierarchy hier(2, 5);
    BoundaryConfig bc = BoundaryConfig::clamped_bottom_theta_all();
    double worst = 0;
    for (Field f : {Field::scalar, Field::vector2}) {
        const auto& sides = f == Field::vector2 ? bc.dirichlet_u : bc.dirichlet_theta;
        DofMap fm(hier.fine(), f, sides), cm(hier.coarse(), f, sides);
        Interpolator in = build_interpolator(hier, fm, cm);
        std::mt19937 rng(11);
        for (int i = 0; i < 100; ++i) {
            Eigen::VectorXd v = random_vector(fm.n_dofs(), rng);
            Eigen::VectorXd a = in.IH * v;
            Eigen::VectorXd b = in.IH * (in.P * a);
            worst = std::max(worst, (b - a).lpNorm<Eigen::Infinity>() /
                                        v.lpNorm<Eigen::Infinity>());
        }
    }
    report(1, "interpolation idempotency", worst <= tol, t.s(), 5,
           strf("max ratio %.2e, tol %.0e, 2 fields x 100 vectors", worst, tol));
}

// global correctors lie in the interpolation kernel and render the
// multiscale basis energy-orthogonal to that kernel, for both bilinear forms
void criterion2() {
    Timer t;
    const double kernel_tol = 1e-10, orth_tol = 1e-9;
    MeshHierarchy hier(2, 4);
    CoefficientField coeff = benchmark_field(4, 8);
    BoundaryConfig bc = BoundaryConfig::clamped_bottom_theta_all();
    double worst_kernel = 0, worst_orth = 0;
    for (Field f : {Field::vector2, Field::scalar}) {
        const auto& sides = f == Field::vector2 ? bc.dirichlet_u : bc.dirichlet_theta;
        DofMap fm(hier.fine(), f, sides), cm(hier.coarse(), f, sides);
        Interpolator in = build_interpolator(hier, fm, cm);
        SparseOperator A = f == Field::vector2 ? assemble_elasticity(hier.fine(), coeff, fm)
                                               : assemble_thermal(hier.fine(), coeff, fm);
        LodSpace lod = build_lod_space(hier, coeff, fm, cm, in, A, k_global, 4);
        for (const auto& q : lod.correctors) {
            Eigen::VectorXd qd(q);
            worst_kernel =
                std::max(worst_kernel, (in.IH * qd).lpNorm<Eigen::Infinity>());
        }
        SparseOperator B = A * lod.basis;
        Eigen::VectorXd phi_norm(lod.basis.cols());
        for (int z = 0; z < lod.basis.cols(); ++z) {
            Eigen::VectorXd phi = lod.basis.col(z), aphi = B.col(z);
            phi_norm[z] = std::sqrt(phi.dot(aphi));
        }
        std::mt19937 rng(13);
        for (int i = 0; i < 50; ++i) {
            Eigen::VectorXd r = random_vector(fm.n_dofs(), rng);
            Eigen::VectorXd w = r - in.P * (in.IH * r);
            double wa = std::sqrt(w.dot(A * w));
            Eigen::VectorXd prods = B.transpose() * w;
            for (int z = 0; z < lod.basis.cols(); ++z)
                worst_orth = std::max(worst_orth, std::abs(prods[z]) / (wa * phi_norm[z]));
        }
    }
    report(2, "corrector kernel + orthogonality",
           worst_kernel <= kernel_tol && worst_orth <= orth_tol, t.s(), 60,
           strf("kernel %.2e (tol %.0e), orthogonality %.2e (tol %.0e)", worst_kernel,
                kernel_tol, worst_orth, orth_tol));
}

// patch-size sweep: saturated patches reproduce the global correctors, and
// the energy gap to the global correctors decays monotonically in k
void criterion3() {
    Timer t;
    const double sat_tol = 1e-9, ratio_tol = 0.5;
    MeshHierarchy hier(2, 4);
    CoefficientField coeff = benchmark_field(4, 8);
    BoundaryConfig bc = BoundaryConfig::clamped_bottom_theta_all();
    int ksat = saturating_k(hier.coarse());
    double worst_sat = 0, worst_ratio = 0;
    bool monotone = true;
    for (Field f : {Field::vector2, Field::scalar}) {
        const auto& sides = f == Field::vector2 ? bc.dirichlet_u : bc.dirichlet_theta;
        DofMap fm(hier.fine(), f, sides), cm(hier.coarse(), f, sides);
        Interpolator in = build_interpolator(hier, fm, cm);
        SparseOperator A = f == Field::vector2 ? assemble_elasticity(hier.fine(), coeff, fm)
                                               : assemble_thermal(hier.fine(), coeff, fm);
        LodSpace glob = build_lod_space(hier, coeff, fm, cm, in, A, k_global, 4);
        LodSpace sat = build_lod_space(hier, coeff, fm, cm, in, A, ksat, 4);
        for (std::size_t z = 0; z < glob.correctors.size(); ++z) {
            Eigen::VectorXd qg(glob.correctors[z]);
            Eigen::VectorXd d = Eigen::VectorXd(sat.correctors[z]) - qg;
            double gap = std::sqrt(d.dot(A * d));
            double scale = std::max(1.0, std::sqrt(qg.dot(A * qg)));
            worst_sat = std::max(worst_sat, gap / scale);
        }
        std::array<double, 4> e{};
        for (int k = 1; k <= 4; ++k) {
            LodSpace loc = build_lod_space(hier, coeff, fm, cm, in, A, k, 4);
            double acc = 0;
            for (std::size_t z = 0; z < glob.correctors.size(); ++z) {
                Eigen::VectorXd d =
                    Eigen::VectorXd(loc.correctors[z]) - Eigen::VectorXd(glob.correctors[z]);
                acc += d.dot(A * d);
            }
            e[k - 1] = std::sqrt(acc);
        }
        for (int k = 1; k < 4; ++k) monotone = monotone && e[k] <= e[k - 1] * (1 + 1e-12);
        worst_ratio = std::max(worst_ratio, e[2] / e[0]);
    }
    report(3, "localization decay", worst_sat <= sat_tol && monotone && worst_ratio < ratio_tol,
           t.s(), 120,
           strf("saturated-vs-global gap %.2e (tol %.0e, k=%d), e(k) monotone %s, "
                "max e(3)/e(1) %.3f (tol %.2f)",
                worst_sat, sat_tol, ksat, monotone ? "yes" : "NO", worst_ratio, ratio_tol));
}

// smooth closed-form solution: simultaneous mesh and time-step halving gives
// first-order accuracy in the energy norm for both fields
void criterion4() {
    Timer t;
    const double lo = 0.8, hi = 1.3;
    manufactured::Problem p{1, 1, 1, 1};
    ThermoLoads loads = p.loads();
    std::vector<double> eu, et;
    for (int level = 3; level <= 5; ++level) {
        CoefficientField coeff =
            CoefficientField::constants(level, p.mu, p.lambda, p.alpha, p.kappa);
        FineOperators ops = FineOperators::build(coeff, BoundaryConfig::all_dirichlet());
        int refine = 1 << (level - 3);
        TimeGrid grid{0.1 / refine, 10 * refine};
        History h = solve_fine(ops, loads, grid);
        eu.push_back(manufactured::h1_error_u(ops.mesh, ops.um, h.u.back(), p, grid.T()));
        et.push_back(manufactured::h1_error_theta(ops.mesh, ops.tm, h.theta.back(), p, grid.T()));
    }
    bool ok = true;
    std::string rates;
    for (int i = 0; i + 1 < 3; ++i) {
        double ru = std::log2(eu[i] / eu[i + 1]), rt = std::log2(et[i] / et[i + 1]);
        ok = ok && ru >= lo && ru <= hi && rt >= lo && rt <= hi;
        rates += strf("%s(u %.2f, th %.2f)", i ? " " : "", ru, rt);
    }
    report(4, "reference solver order", ok, t.s(), 120,
           strf("EOC %s, window [%.1f, %.1f]", rates.c_str(), lo, hi));
}

// shipped composite benchmark: multiscale errors fall with H at mean order
// >= 0.8 and beat the coarse FEM at the two finest levels
void criterion5() {
    Timer t;
    ExperimentConfig cfg = parse_config_file(ACCEPTANCE_CONFIG_DIR "/experiment1.cfg");
    RunOptions opts;
    opts.threads = 4;
    ConvergenceResult r = run_convergence(cfg, opts);
    bool dec_u = true, dec_t = true, beats = true;
    std::string seq;
    for (std::size_t i = 0; i < r.gfem.size(); ++i) {
        if (i) {
            dec_u = dec_u && r.gfem[i].rel_err_u < r.gfem[i - 1].rel_err_u;
            dec_t = dec_t && r.gfem[i].rel_err_theta < r.gfem[i - 1].rel_err_theta;
        }
        if (i + 2 >= r.gfem.size())
            beats = beats && r.gfem[i].rel_err_u < r.fem[i].rel_err_u &&
                    r.gfem[i].rel_err_theta < r.fem[i].rel_err_theta;
        seq += strf("%s%.4g", i ? " " : "", r.gfem[i].rel_err_u);
    }
    double eu = mean_eoc(r.gfem, false), et = mean_eoc(r.gfem, true);
    bool ok = dec_u && dec_t && eu >= 0.8 && et >= 0.8 && beats;
    report(5, "composite benchmark sweep", ok, t.s(), 600,
           strf("u errs [%s] decreasing %s, theta decreasing %s, mean EOC u %.2f theta %.2f "
                "(>= 0.8), beats coarse FEM at two finest %s",
                seq.c_str(), dec_u ? "yes" : "NO", dec_t ? "yes" : "NO", eu, et,
                beats ? "yes" : "NO"));
}

// random expansion-contrast benchmark: the temperature-driven displacement
// correction is what keeps the displacement error convergent
void criterion6() {
    Timer t;
    ExperimentConfig cfg = parse_config_file(ACCEPTANCE_CONFIG_DIR "/experiment2.cfg");
    RunOptions opts;
    opts.threads = 4;
    CompareAlphaResult r = run_compare_alpha(cfg, opts);
    double ratio = r.corrected.back().rel_err_u / r.uncorrected.back().rel_err_u;
    double cu = mean_eoc(r.corrected, false), ct = mean_eoc(r.corrected, true);
    double uu = mean_eoc(r.uncorrected, false);
    bool ok = ratio <= 0.7 && cu >= 0.8 && ct >= 0.8 && uu <= 0.4 && uu <= cu - 0.5;
    report(6, "expansion-contrast comparison", ok, t.s(), 600,
           strf("finest-H error ratio %.3f (<= 0.7), corrected mean EOC u %.2f theta %.2f "
                "(>= 0.8), uncorrected u EOC %.2f (<= 0.4 and <= corrected-0.5)",
                ratio, cu, ct, uu));
}

// all-zero data must produce exactly zero trajectories in every solver mode
void criterion7() {
    Timer t;
    const double tol = 1e-14;
    ExperimentConfig cfg;
    cfg.fine_level = 3;
    cfg.coarse_levels = {1, 2};
    cfg.k_schedule = {1, 1};
    cfg.raster_n = 4;
    cfg.f_x = cfg.f_y = 0;
    cfg.g = 0;
    cfg.theta0 = "zero";
    cfg.tau = 0.1;
    cfg.T = 0.3;
    validate_config(cfg);
    RunOptions opts;
    opts.threads = 2;
    double worst = 0;
    for (const char* mode : {"ref", "fem", "gfem"}) {
        RunResult r = run_single(cfg, mode, opts);
        for (const auto& v : r.history.u) worst = std::max(worst, v.lpNorm<Eigen::Infinity>());
        for (const auto& v : r.history.theta)
            worst = std::max(worst, v.lpNorm<Eigen::Infinity>());
    }
    report(7, "zero-data exactness", worst <= tol, t.s(), 10,
           strf("max |state| %.2e over ref/fem/gfem (tol %.0e)", worst, tol));
}

// with no sources the temperature conductivity energy is dissipated and the
// H1 norm stays below the bound from the coefficient contrast and the
// unit-square Poincare constant
void criterion8() {
    Timer t;
    CoefficientField coeff = benchmark_field(4, 8);  // kappa in [1, 10]
    FineOperators ops = FineOperators::build(coeff, BoundaryConfig::clamped_bottom_theta_all());
    ThermoLoads loads = ThermoLoads::constants({0, 0}, 0, 500);
    TimeGrid grid{0.05, 20};
    History h = solve_fine(ops, loads, grid);
    const double poincare_sq = 1.0 / (2 * M_PI * M_PI);
    const double C = std::sqrt((1 + poincare_sq) * 10.0 / 1.0);
    double theta0_h1 = h1_norm(ops.mesh, ops.tm, h.theta[0]);
    bool energy_monotone = true;
    double worst_ratio = 0, prev = 0;
    for (std::size_t n = 0; n < h.theta.size(); ++n) {
        double e = std::sqrt(h.theta[n].dot(ops.A_t * h.theta[n]));
        if (n) energy_monotone = energy_monotone && e <= prev * (1 + 1e-12);
        prev = e;
        worst_ratio =
            std::max(worst_ratio, h1_norm(ops.mesh, ops.tm, h.theta[n]) / (C * theta0_h1));
    }
    report(8, "temperature stability bound", energy_monotone && worst_ratio <= 1.0, t.s(), 60,
           strf("conductivity energy monotone %s, max |theta|_H1 / (C |theta0|_H1) = %.3f "
                "with C = %.3f",
                energy_monotone ? "yes" : "NO", worst_ratio, C));
}

std::string drop_last_column(const std::string& csv) {
    std::string out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t nl = csv.find('\n', pos);
        if (nl == std::string::npos) nl = csv.size();
        std::string line = csv.substr(pos, nl - pos);
        std::size_t comma = line.rfind(',');
        out += (comma == std::string::npos ? line : line.substr(0, comma)) + "\n";
        pos = nl + 1;
    }
    return out;
}

// repeated sweeps at different thread counts must agree byte-for-byte once
// the wall-clock column (the only nondeterministic field) is removed
void criterion9() {
    Timer t;
    ExperimentConfig cfg;
    cfg.fine_level = 4;
    cfg.coarse_levels = {1, 2};
    cfg.k_schedule = {1, 1};
    cfg.raster_n = 8;
    cfg.tau = 0.1;
    cfg.T = 0.3;
    validate_config(cfg);
    auto render = [&](int threads) {
        RunOptions opts;
        opts.threads = threads;
        ConvergenceResult r = run_convergence(cfg, opts);
        return drop_last_column(convergence_csv(r.gfem)) + "|" +
               drop_last_column(convergence_csv(r.fem));
    };
    std::string a = render(1), b = render(1), c = render(4), d = render(4);
    bool ok = a == b && a == c && a == d;
    report(9, "run determinism", ok, t.s(), 120,
           strf("4 sweeps at 1/1/4/4 threads %s (compared without the wall-time column)",
                ok ? "identical" : "DIFFER"));
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
