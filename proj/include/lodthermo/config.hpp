#pragma once

#include "lodthermo/assembly.hpp"
#include "lodthermo/coefficients.hpp"
#include "lodthermo/errors.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lodthermo {

/// One experiment, parsed from a flat "key = value" file with [section]
/// headers.  Defaults describe the shipped composite benchmark at desk scale.
struct ExperimentConfig {
    // [mesh]
    int fine_level = 5;
    std::vector<int> coarse_levels = {1, 2, 3, 4};
    std::vector<int> k_schedule = {1, 1, 2, 2};  ///< empty => automatic from k_c
    double k_c = 1.0;                            ///< k = max(1, round(k_c * log2(1/H)))

    // [boundary]
    std::string boundary = "clamped-bottom";  ///< or "all-dirichlet"

    // [coefficients]
    std::string coefficients = "composite";  ///< constants|composite|checkerboard|raster-file
    double mu = 1, lambda = 1, alpha = 1, kappa = 1;
    double mu_inclusion = 10, lambda_inclusion = 50, alpha_inclusion = 10, kappa_inclusion = 10;
    int raster_n = 32;  ///< cells of side 1/32, the finest the default mesh resolves
    std::uint32_t seed = 42;
    double alpha_low = 0.1, alpha_high = 10;
    std::string raster_path;

    // [data]
    double f_x = 0, f_y = 0;
    double g = -10;
    std::string theta0 = "bubble";  ///< "bubble" = x(1-x)y(1-y), or "zero"
    double theta0_scale = 500;

    // [time]
    double tau = 0.05;
    double T = 1.0;

    // [run]
    std::string out_dir = "out";
    int threads = 0;  ///< 0 = hardware concurrency
    bool alpha_correction = true;
    std::string cache_dir;  ///< empty = no corrector cache
    double residual_tol = 1e-8;
};

/// Parses and validates; throws ConfigError naming the offending field and,
/// for syntax problems, the line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

/// Normal form: fixed section/key order, %.12g numbers.  Stable under
/// parse -> serialize round trips.
std::string serialize_config(const ExperimentConfig&);

/// Validation shared by the parser and programmatic construction.
void validate_config(const ExperimentConfig&);

/// Number of backward-Euler steps, T / tau (validated integral).
int config_steps(const ExperimentConfig&);

/// Patch size for coarse_levels[idx]: the schedule entry, or the automatic
/// rule max(1, round(k_c * log2(1/H))) with H = sqrt(2) * 2^-level.
int config_k(const ExperimentConfig&, std::size_t idx);

/// Coefficient field on the fine mesh described by the [coefficients] section.
CoefficientField make_coefficients(const ExperimentConfig&);

BoundaryConfig make_boundary(const ExperimentConfig&);

/// Grows the schedule to full scale: one more fine refinement, one more
/// coarse level, patch size continuing the +1 progression of the tail.
void extend_to_full_scale(ExperimentConfig&);

} // namespace lodthermo
