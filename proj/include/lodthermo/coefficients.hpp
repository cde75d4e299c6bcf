#pragma once

#include "lodthermo/mesh.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace lodthermo {

/// Cell-centered scalar raster on [0,1]^2: nx x ny cells, cell (ix, iy)
/// covering [ix/nx,(ix+1)/nx] x [iy/ny,(iy+1)/ny].  nx, ny are powers of two
/// so cells align with some criss-cross mesh.
struct Raster {
    int nx = 0, ny = 0;
    Eigen::ArrayXXd values;  ///< values(ix, iy)

    double at(int ix, int iy) const { return values(ix, iy); }
    bool is_binary() const;
};

/// Parses the ASCII raster format: first line "nx ny", then ny rows of nx
/// reals, rows ordered bottom-up.  Throws std::runtime_error with a line
/// number on malformed input; powers of two are enforced.
Raster read_raster(std::istream& in);
Raster read_raster_file(const std::string& path);
std::string write_raster(const Raster& r);

/// Periodic array of square inclusions: n x n cells with value 1 where both
/// cell indices are odd, 0 elsewhere (inclusions of side 1/n separated by
/// 1/n gaps, background along the bottom/left boundary).
Raster composite_inclusions_raster(int n);

/// Independent 0/1 cells from the low bit of std::mt19937 draws — raw engine
/// output is pinned by the standard, so the layout is platform-stable.
Raster random_checkerboard_raster(int n, std::uint32_t seed = 42);

/// Isotropic-by-default material data stored per fine-mesh triangle:
/// Lame coefficients mu, lambda, thermal expansion alpha and a symmetric
/// positive definite conductivity kappa = [[k11,k12],[k12,k22]].
/// Piecewise constant per element, so one-point quadrature is exact for all
/// bilinear forms with P1 factors.
class CoefficientField {
public:
    /// Spatially constant isotropic field on the level-m mesh.
    static CoefficientField constants(int level, double mu, double lambda,
                                      double alpha, double kappa);

    /// Two-phase field from a binary raster: cells with value 0 get the
    /// background constants, cells with value 1 the inclusion constants.
    /// Raster resolution must divide the mesh resolution.
    struct Phase {
        double mu, lambda, alpha, kappa;
    };
    static CoefficientField two_phase(int level, const Raster& r,
                                      const Phase& background, const Phase& inclusion);

    /// Like two_phase but only alpha varies; raster values are used directly
    /// as alpha (e.g. checkerboard over {0.1, 10}).
    static CoefficientField alpha_raster(int level, const Raster& alpha,
                                         double mu, double lambda, double kappa);

    int level() const { return level_; }
    int n_elements() const { return (int)mu_.size(); }

    double mu(int t) const { return mu_[t]; }
    double lambda(int t) const { return lambda_[t]; }
    double alpha(int t) const { return alpha_[t]; }
    Eigen::Matrix2d kappa(int t) const;

    // global bounds (kappa via eigenvalues)
    double mu_min() const { return mu_.minCoeff(); }
    double mu_max() const { return mu_.maxCoeff(); }
    double lambda_min() const { return lambda_.minCoeff(); }
    double lambda_max() const { return lambda_.maxCoeff(); }
    double alpha_min() const { return alpha_.minCoeff(); }
    double alpha_max() const { return alpha_.maxCoeff(); }
    double kappa_min() const;
    double kappa_max() const;

    /// FNV-1a over levels and raw coefficient bytes; cache key component.
    std::uint64_t content_hash() const;

private:
    CoefficientField(int level, int n);
    void validate() const;

    int level_;
    Eigen::ArrayXd mu_, lambda_, alpha_;
    Eigen::ArrayXd k11_, k12_, k22_;
};

} // namespace lodthermo
