#include "lodthermo/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

namespace lodthermo {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* kind_name(char kind) {
    switch (kind) {
        case 'u': return "elasticity correctors";
        case 't': return "thermal correctors";
        default: return "alpha columns";
    }
}

} // namespace

int resolve_threads(std::optional<int> cli_value, const ExperimentConfig& cfg) {
    int v;
    if (cli_value) {
        v = *cli_value;
    } else if (const char* env = std::getenv("LODTHERMO_THREADS")) {
        char* end = nullptr;
        long parsed = std::strtol(env, &end, 10);
        if (end == env || *end != '\0')
            throw ConfigError(std::string("LODTHERMO_THREADS must be an integer, got '") + env +
                              "'");
        v = (int)parsed;
    } else {
        v = cfg.threads;
    }
    if (v <= 0) v = (int)std::thread::hardware_concurrency();
    return v > 0 ? v : 1;
}

ThermoLoads make_loads(const ExperimentConfig& c) {
    double scale = c.theta0 == "zero" ? 0.0 : c.theta0_scale;
    return ThermoLoads::constants({c.f_x, c.f_y}, c.g, scale);
}

TimeGrid make_grid(const ExperimentConfig& c) { return {c.tau, config_steps(c)}; }

MsSpaces build_ms_spaces(const FineOperators& ops, const MeshHierarchy& hier, int k,
                         const RunOptions& opts) {
    DofMap cum(hier.coarse(), Field::vector2, ops.um.dirichlet_sides());
    DofMap ctm(hier.coarse(), Field::scalar, ops.tm.dirichlet_sides());
    Interpolator iu = build_interpolator(hier, ops.um, cum);
    Interpolator it = build_interpolator(hier, ops.tm, ctm);

    std::uint32_t bmask = boundary_mask(ops.um.dirichlet_sides(), ops.tm.dirichlet_sides());
    auto with_cache = [&](char kind, auto&& compute) {
        CacheKey key{hier.coarse().level(), hier.fine().level(), k, kind,
                     ops.coeff.content_hash(), bmask};
        std::vector<Eigen::SparseVector<double>> cols;
        std::string path;
        if (!opts.cache_dir.empty()) {
            path = opts.cache_dir + "/" + key.file_name();
            if (load_columns(path, key, cols)) {
                if (opts.log)
                    *opts.log << "[cache] hit " << kind_name(kind) << " level="
                              << key.coarse_level << " k=" << k << "\n";
                return cols;
            }
        }
        cols = compute();
        if (!path.empty()) {
            std::filesystem::create_directories(opts.cache_dir);
            save_columns(path, key, cols);
            if (opts.log)
                *opts.log << "[cache] stored " << kind_name(kind) << " level="
                          << key.coarse_level << " k=" << k << "\n";
        }
        return cols;
    };

    MsSpaces s;
    auto ucols = with_cache('u', [&] {
        return build_lod_space(hier, ops.coeff, ops.um, cum, iu, ops.A_u, k, opts.threads)
            .correctors;
    });
    LodSpace lu;
    lu.correctors = std::move(ucols);
    s.Phi_u = iu.P - lu.corrector_matrix(ops.um.n_dofs());

    auto tcols = with_cache('t', [&] {
        return build_lod_space(hier, ops.coeff, ops.tm, ctm, it, ops.A_t, k, opts.threads)
            .correctors;
    });
    LodSpace lt;
    lt.correctors = std::move(tcols);
    s.Phi_t = it.P - lt.corrector_matrix(ops.tm.n_dofs());

    if (opts.alpha_correction) {
        auto acols = with_cache('a', [&] {
            return build_alpha_correction(hier, ops.coeff, ops.um, ops.tm, iu, ops.A_u, s.Phi_t,
                                          k, opts.threads)
                .columns;
        });
        AlphaCorrection ac;
        ac.columns = std::move(acols);
        s.X = ac.as_matrix(ops.um.n_dofs());
        s.alpha_corrected = true;
    } else {
        s.X.resize(ops.um.n_dofs(), 0);
    }
    return s;
}

RunResult run_single(const ExperimentConfig& cfg, const std::string& mode,
                     const RunOptions& opts) {
    if (mode != "ref" && mode != "fem" && mode != "gfem" && mode != "gfem-nocorr")
        throw ConfigError("unknown mode '" + mode + "' (expected ref, fem, gfem or gfem-nocorr)");

    auto t0 = std::chrono::steady_clock::now();
    FineOperators ops = FineOperators::build(make_coefficients(cfg), make_boundary(cfg));
    ThermoLoads loads = make_loads(cfg);
    TimeGrid grid = make_grid(cfg);

    RunResult r;
    if (mode == "ref") {
        r.history = solve_fine(ops, loads, grid);
        auto [ru, rt] = scheme_residual(ops, loads, r.history);
        if (ru > cfg.residual_tol || rt > cfg.residual_tol)
            throw SolverError("reference solve residual above run.residual_tol");
    } else {
        int idx = (int)cfg.coarse_levels.size() - 1;
        int mc = cfg.coarse_levels[idx];
        MeshHierarchy hier(mc, cfg.fine_level);
        if (mode == "fem") {
            r.history = solve_coarse_fem(ops, hier, loads, grid).fine;
        } else {
            int k = opts.k_override.value_or(config_k(cfg, idx));
            RunOptions o = opts;
            if (mode == "gfem-nocorr") o.alpha_correction = false;
            MsSpaces ms = build_ms_spaces(ops, hier, k, o);
            GfemSystem sys =
                build_gfem_system(ops, ms.Phi_u, ms.Phi_t, ms.alpha_corrected ? &ms.X : nullptr);
            GfemHistory g = solve_gfem(sys, ops, loads, grid);
            r.history.grid = grid;
            r.history.times = g.times;
            r.history.u = std::move(g.u);
            r.history.theta = std::move(g.theta);
        }
    }
    r.wall_time_s = seconds_since(t0);
    return r;
}

namespace {

/// Shared sweep scaffolding: fine reference plus a per-level callback that
/// appends records given the hierarchy and patch size.
template <typename PerLevel>
void sweep(const ExperimentConfig& cfg, const RunOptions& opts, const PerLevel& per_level) {
    FineOperators ops = FineOperators::build(make_coefficients(cfg), make_boundary(cfg));
    ThermoLoads loads = make_loads(cfg);
    TimeGrid grid = make_grid(cfg);
    if (opts.log)
        *opts.log << "[ref] fine level " << cfg.fine_level << ", " << grid.steps << " steps\n";
    History ref = solve_fine(ops, loads, grid);
    for (std::size_t i = 0; i < cfg.coarse_levels.size(); ++i) {
        int k = opts.k_override.value_or(config_k(cfg, i));
        MeshHierarchy hier(cfg.coarse_levels[i], cfg.fine_level);
        per_level(ops, loads, grid, ref, hier, k);
    }
}

LevelRecord make_record(const FineOperators& ops, const History& ref, const MeshHierarchy& hier,
                        int k, const std::vector<Eigen::VectorXd>& u,
                        const std::vector<Eigen::VectorXd>& theta, double wall) {
    LevelRecord rec;
    rec.coarse_level = hier.coarse().level();
    rec.H = hier.coarse().h();
    rec.k = k;
    rec.rel_err_u = relative_h1_error(ops.mesh, ops.um, u.back(), ref.u.back());
    rec.rel_err_theta = relative_h1_error(ops.mesh, ops.tm, theta.back(), ref.theta.back());
    rec.wall_time_s = wall;
    return rec;
}

} // namespace

ConvergenceResult run_convergence(const ExperimentConfig& cfg, const RunOptions& opts) {
    ConvergenceResult out;
    sweep(cfg, opts,
          [&](const FineOperators& ops, const ThermoLoads& loads, const TimeGrid& grid,
              const History& ref, const MeshHierarchy& hier, int k) {
              auto t0 = std::chrono::steady_clock::now();
              MsSpaces ms = build_ms_spaces(ops, hier, k, opts);
              GfemSystem sys = build_gfem_system(ops, ms.Phi_u, ms.Phi_t,
                                                 ms.alpha_corrected ? &ms.X : nullptr);
              GfemHistory g = solve_gfem(sys, ops, loads, grid);
              out.gfem.push_back(
                  make_record(ops, ref, hier, k, g.u, g.theta, seconds_since(t0)));

              t0 = std::chrono::steady_clock::now();
              CoarseFemResult cf = solve_coarse_fem(ops, hier, loads, grid);
              out.fem.push_back(make_record(ops, ref, hier, 0, cf.fine.u, cf.fine.theta,
                                            seconds_since(t0)));
              if (opts.log)
                  *opts.log << "[level " << hier.coarse().level() << "] k=" << k
                            << " gfem u=" << out.gfem.back().rel_err_u
                            << " theta=" << out.gfem.back().rel_err_theta
                            << " | fem u=" << out.fem.back().rel_err_u
                            << " theta=" << out.fem.back().rel_err_theta << "\n";
          });
    return out;
}

CompareAlphaResult run_compare_alpha(const ExperimentConfig& cfg, const RunOptions& opts) {
    CompareAlphaResult out;
    RunOptions with_alpha = opts;
    with_alpha.alpha_correction = true;
    sweep(cfg, with_alpha,
          [&](const FineOperators& ops, const ThermoLoads& loads, const TimeGrid& grid,
              const History& ref, const MeshHierarchy& hier, int k) {
              auto t0 = std::chrono::steady_clock::now();
              MsSpaces ms = build_ms_spaces(ops, hier, k, with_alpha);
              GfemSystem corrected = build_gfem_system(ops, ms.Phi_u, ms.Phi_t, &ms.X);
              GfemHistory gc = solve_gfem(corrected, ops, loads, grid);
              out.corrected.push_back(
                  make_record(ops, ref, hier, k, gc.u, gc.theta, seconds_since(t0)));

              t0 = std::chrono::steady_clock::now();
              GfemSystem plain = build_gfem_system(ops, ms.Phi_u, ms.Phi_t, nullptr);
              GfemHistory gp = solve_gfem(plain, ops, loads, grid);
              out.uncorrected.push_back(
                  make_record(ops, ref, hier, k, gp.u, gp.theta, seconds_since(t0)));
              if (opts.log)
                  *opts.log << "[level " << hier.coarse().level() << "] k=" << k
                            << " corrected u=" << out.corrected.back().rel_err_u
                            << " uncorrected u=" << out.uncorrected.back().rel_err_u << "\n";
          });
    return out;
}

} // namespace lodthermo
