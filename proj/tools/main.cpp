#include <CLI11.hpp>

#include "lodthermo/runner.hpp"

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace lodthermo;

namespace {

struct CliArgs {
    std::string config_path, out_dir, cache_dir, k_str, mode = "ref", target;
    std::optional<int> threads;
    bool paper_exact = false, no_alpha = false, dump_states = false;
    int level = 6;
};

void add_shared(CLI::App* sub, CliArgs& a) {
    sub->add_option("--config", a.config_path, "experiment config file")->required();
    sub->add_option("--out", a.out_dir, "output directory (overrides run.out_dir)");
    sub->add_option("--k", a.k_str, "patch size override: an integer, or 'auto' for the rule");
    sub->add_option("--threads", a.threads, "worker threads (0 = hardware concurrency)");
    sub->add_flag("--paper-exact", a.paper_exact,
                  "grow the schedule to full scale (one more refinement level)");
    sub->add_flag("--no-alpha-correction", a.no_alpha,
                  "drop the temperature-driven displacement correction");
    sub->add_option("--cache", a.cache_dir, "corrector cache directory");
}

ExperimentConfig load_config(const CliArgs& a) {
    ExperimentConfig cfg = parse_config_file(a.config_path);
    if (a.paper_exact) extend_to_full_scale(cfg);
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    if (!a.cache_dir.empty()) cfg.cache_dir = a.cache_dir;
    if (a.no_alpha) cfg.alpha_correction = false;
    if (a.k_str == "auto") cfg.k_schedule.clear();
    return cfg;
}

RunOptions make_options(const CliArgs& a, const ExperimentConfig& cfg) {
    RunOptions o;
    o.threads = resolve_threads(a.threads, cfg);
    if (!a.k_str.empty() && a.k_str != "auto") {
        char* end = nullptr;
        long k = std::strtol(a.k_str.c_str(), &end, 10);
        if (end == a.k_str.c_str() || *end != '\0' || k < 1)
            throw ConfigError("--k expects a positive integer or 'auto', got '" + a.k_str + "'");
        o.k_override = (int)k;
    }
    o.alpha_correction = cfg.alpha_correction;
    o.cache_dir = cfg.cache_dir;
    o.log = &std::cerr;
    return o;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

void write_plot(const std::string& path, const std::string& header,
                const std::vector<LevelRecord>& a, const std::vector<LevelRecord>& b,
                bool theta) {
    std::string text = "# " + header + "\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        double ea = theta ? a[i].rel_err_theta : a[i].rel_err_u;
        double eb = theta ? b[i].rel_err_theta : b[i].rel_err_u;
        text += fmt(a[i].H) + " " + fmt(ea) + " " + fmt(eb) + "\n";
    }
    write_file(path, text);
}

void cmd_mesh_info(int level) {
    TriMesh mesh(level);
    std::printf("vertices=%d triangles=%d h=%s\n", mesh.n_vertices(), mesh.n_triangles(),
                fmt(mesh.h()).c_str());
}

void cmd_inspect(const CliArgs& a) {
    ExperimentConfig cfg = load_config(a);
    if (a.target == "mesh") {
        cmd_mesh_info(cfg.fine_level);
        return;
    }
    if (a.target == "coefficients") {
        CoefficientField f = make_coefficients(cfg);
        double mu_lo = f.mu(0), mu_hi = f.mu(0), la_lo = f.lambda(0), la_hi = f.lambda(0);
        double al_lo = f.alpha(0), al_hi = f.alpha(0);
        double ka_lo = 0, ka_hi = 0;
        for (int t = 0; t < f.n_elements(); ++t) {
            mu_lo = std::min(mu_lo, f.mu(t)), mu_hi = std::max(mu_hi, f.mu(t));
            la_lo = std::min(la_lo, f.lambda(t)), la_hi = std::max(la_hi, f.lambda(t));
            al_lo = std::min(al_lo, f.alpha(t)), al_hi = std::max(al_hi, f.alpha(t));
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(f.kappa(t));
            double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
            if (t == 0) ka_lo = lo, ka_hi = hi;
            ka_lo = std::min(ka_lo, lo), ka_hi = std::max(ka_hi, hi);
        }
        std::printf("elements=%d mu=[%s,%s] lambda=[%s,%s] alpha=[%s,%s] kappa=[%s,%s] "
                    "mu_ratio=%s\n",
                    f.n_elements(), fmt(mu_lo).c_str(), fmt(mu_hi).c_str(), fmt(la_lo).c_str(),
                    fmt(la_hi).c_str(), fmt(al_lo).c_str(), fmt(al_hi).c_str(),
                    fmt(ka_lo).c_str(), fmt(ka_hi).c_str(), fmt(mu_hi / mu_lo).c_str());
        return;
    }
    // basis: dimensions at the finest scheduled coarse level plus one sampled
    // multiscale temperature basis function as plot data
    RunOptions opts = make_options(a, cfg);
    FineOperators ops = FineOperators::build(make_coefficients(cfg), make_boundary(cfg));
    int idx = (int)cfg.coarse_levels.size() - 1;
    MeshHierarchy hier(cfg.coarse_levels[idx], cfg.fine_level);
    int k = opts.k_override.value_or(config_k(cfg, idx));
    MsSpaces ms = build_ms_spaces(ops, hier, k, opts);
    std::printf("u_dim=%d theta_dim=%d k=%d fine_u_dofs=%d fine_theta_dofs=%d\n",
                (int)ms.Phi_u.cols(), (int)ms.Phi_t.cols(), k, (int)ms.Phi_u.rows(),
                (int)ms.Phi_t.rows());
    if (ms.Phi_t.cols() > 0) {
        Eigen::VectorXd col = Eigen::VectorXd(ms.Phi_t.col(ms.Phi_t.cols() / 2));
        std::string text = "# x y theta_ms\n";
        for (int v = 0; v < ops.mesh.n_vertices(); ++v) {
            int d = ops.tm.dof(v);
            double val = d >= 0 ? col[d] : 0.0;
            auto p = ops.mesh.vertex(v);
            text += fmt(p.x()) + " " + fmt(p.y()) + " " + fmt(val) + "\n";
        }
        ensure_dir(cfg.out_dir);
        std::string path = cfg.out_dir + "/basis_sample.dat";
        write_file(path, text);
        std::printf("wrote %s\n", path.c_str());
    }
}

void cmd_correctors(const CliArgs& a) {
    ExperimentConfig cfg = load_config(a);
    RunOptions opts = make_options(a, cfg);
    if (opts.cache_dir.empty())
        throw ConfigError("correctors needs a cache directory (--cache or run.cache_dir)");
    FineOperators ops = FineOperators::build(make_coefficients(cfg), make_boundary(cfg));
    for (std::size_t i = 0; i < cfg.coarse_levels.size(); ++i) {
        int k = opts.k_override.value_or(config_k(cfg, i));
        MeshHierarchy hier(cfg.coarse_levels[i], cfg.fine_level);
        MsSpaces ms = build_ms_spaces(ops, hier, k, opts);
        std::printf("level=%d k=%d u_cols=%d theta_cols=%d alpha_cols=%d\n",
                    cfg.coarse_levels[i], k, (int)ms.Phi_u.cols(), (int)ms.Phi_t.cols(),
                    (int)ms.X.cols());
    }
}

void cmd_solve(const CliArgs& a) {
    ExperimentConfig cfg = load_config(a);
    RunOptions opts = make_options(a, cfg);
    RunResult r = run_single(cfg, a.mode, opts);
    ensure_dir(cfg.out_dir);
    std::string path = cfg.out_dir + "/history.csv";
    write_file(path, history_csv(r.history.times, r.history.u, r.history.theta));
    if (a.dump_states) {
        for (std::size_t n = 0; n < r.history.u.size(); ++n) {
            char name[64];
            std::snprintf(name, sizeof name, "/state_u_%04zu.txt", n);
            std::string text;
            for (int i = 0; i < r.history.u[n].size(); ++i) {
                char line[48];
                std::snprintf(line, sizeof line, "%d %.17g\n", i, r.history.u[n][i]);
                text += line;
            }
            write_file(cfg.out_dir + name, text);
            std::snprintf(name, sizeof name, "/state_theta_%04zu.txt", n);
            text.clear();
            for (int i = 0; i < r.history.theta[n].size(); ++i) {
                char line[48];
                std::snprintf(line, sizeof line, "%d %.17g\n", i, r.history.theta[n][i]);
                text += line;
            }
            write_file(cfg.out_dir + name, text);
        }
    }
    std::printf("mode=%s steps=%d wrote %s (%.2fs)\n", a.mode.c_str(), r.history.grid.steps,
                path.c_str(), r.wall_time_s);
}

void cmd_convergence(const CliArgs& a) {
    ExperimentConfig cfg = load_config(a);
    RunOptions opts = make_options(a, cfg);
    ConvergenceResult res = run_convergence(cfg, opts);
    ensure_dir(cfg.out_dir);
    write_file(cfg.out_dir + "/gfem.csv", convergence_csv(res.gfem));
    write_file(cfg.out_dir + "/fem.csv", convergence_csv(res.fem));
    write_plot(cfg.out_dir + "/plot_u.dat", "H gfem fem", res.gfem, res.fem, false);
    write_plot(cfg.out_dir + "/plot_theta.dat", "H gfem fem", res.gfem, res.fem, true);
    std::printf("wrote %s/{gfem.csv,fem.csv,plot_u.dat,plot_theta.dat}\n", cfg.out_dir.c_str());
    std::printf("gfem mean EOC: u=%s theta=%s\n", fmt(mean_eoc(res.gfem, false)).c_str(),
                fmt(mean_eoc(res.gfem, true)).c_str());
}

void cmd_compare_alpha(const CliArgs& a) {
    ExperimentConfig cfg = load_config(a);
    RunOptions opts = make_options(a, cfg);
    CompareAlphaResult res = run_compare_alpha(cfg, opts);
    ensure_dir(cfg.out_dir);
    write_file(cfg.out_dir + "/corrected.csv", convergence_csv(res.corrected));
    write_file(cfg.out_dir + "/uncorrected.csv", convergence_csv(res.uncorrected));
    write_plot(cfg.out_dir + "/plot_alpha_u.dat", "H corrected uncorrected", res.corrected,
               res.uncorrected, false);
    std::printf("wrote %s/{corrected.csv,uncorrected.csv,plot_alpha_u.dat}\n",
                cfg.out_dir.c_str());
    std::printf("corrected mean EOC: u=%s theta=%s\n", fmt(mean_eoc(res.corrected, false)).c_str(),
                fmt(mean_eoc(res.corrected, true)).c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale solver for quasistatic thermoelasticity with rough coefficients"};
    app.require_subcommand(1);
    CliArgs a;

    CLI::App* mesh_info = app.add_subcommand("mesh-info", "criss-cross mesh counts and size");
    mesh_info->add_option("--level", a.level, "refinement level m (N = 2^m cells per side)")
        ->check(CLI::Range(0, 12));

    CLI::App* inspect = app.add_subcommand("inspect", "summarize mesh, coefficients or basis");
    inspect->add_option("target", a.target, "mesh | coefficients | basis")
        ->required()
        ->check(CLI::IsMember({"mesh", "coefficients", "basis"}));
    add_shared(inspect, a);

    CLI::App* correctors =
        app.add_subcommand("correctors", "precompute corrector caches for the schedule");
    add_shared(correctors, a);

    CLI::App* solve = app.add_subcommand("solve", "run one solver and export the history");
    solve->add_option("--mode", a.mode, "ref | fem | gfem | gfem-nocorr")
        ->check(CLI::IsMember({"ref", "fem", "gfem", "gfem-nocorr"}));
    solve->add_flag("--dump-states", a.dump_states, "write per-step state vectors");
    add_shared(solve, a);

    CLI::App* convergence =
        app.add_subcommand("convergence", "multiscale vs coarse-FEM error sweep");
    add_shared(convergence, a);

    CLI::App* compare =
        app.add_subcommand("compare-alpha", "corrected vs uncorrected multiscale sweep");
    add_shared(compare, a);

    try {
        app.parse(argc, argv);
        if (mesh_info->parsed()) cmd_mesh_info(a.level);
        else if (inspect->parsed()) cmd_inspect(a);
        else if (correctors->parsed()) cmd_correctors(a);
        else if (solve->parsed()) cmd_solve(a);
        else if (convergence->parsed()) cmd_convergence(a);
        else if (compare->parsed()) cmd_compare_alpha(a);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
}
