#pragma once

#include "lodthermo/config.hpp"
#include "lodthermo/solvers.hpp"

#include <iosfwd>
#include <optional>

namespace lodthermo {

/// Effective worker count: explicit CLI value beats LODTHERMO_THREADS beats
/// the config value; anything <= 0 means hardware concurrency.
int resolve_threads(std::optional<int> cli_value, const ExperimentConfig&);

ThermoLoads make_loads(const ExperimentConfig&);
TimeGrid make_grid(const ExperimentConfig&);

/// Per-invocation overrides the CLI layers over the config.
struct RunOptions {
    int threads = 1;
    std::optional<int> k_override;  ///< replaces the schedule/auto patch sizes
    bool alpha_correction = true;
    std::string cache_dir;          ///< empty = recompute correctors every run
    std::ostream* log = nullptr;    ///< progress/cache lines, newline-terminated
};

/// Multiscale bases for one hierarchy.  X holds the temperature-driven
/// displacement corrections; zero columns when the correction is disabled.
struct MsSpaces {
    SparseOperator Phi_u, Phi_t, X;
    bool alpha_corrected = false;
};
MsSpaces build_ms_spaces(const FineOperators&, const MeshHierarchy&, int k, const RunOptions&);

struct RunResult {
    History history;  ///< fine-space trajectories for every mode
    double wall_time_s = 0;
};

/// One solver run; mode is ref | fem | gfem | gfem-nocorr.  Reduced modes use
/// the last (finest) coarse level of the schedule.
RunResult run_single(const ExperimentConfig&, const std::string& mode, const RunOptions&);

/// Fine reference once, then per coarse level the multiscale and the standard
/// coarse-FEM relative final-time errors.
struct ConvergenceResult {
    std::vector<LevelRecord> gfem, fem;
};
ConvergenceResult run_convergence(const ExperimentConfig&, const RunOptions&);

/// Same sweep solved twice per level from shared bases: with and without the
/// temperature-driven displacement correction.
struct CompareAlphaResult {
    std::vector<LevelRecord> corrected, uncorrected;
};
CompareAlphaResult run_compare_alpha(const ExperimentConfig&, const RunOptions&);

} // namespace lodthermo
