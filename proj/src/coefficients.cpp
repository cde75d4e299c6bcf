#include "lodthermo/coefficients.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lodthermo {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

[[noreturn]] void raster_error(int line, const std::string& what) {
    throw std::runtime_error("raster line " + std::to_string(line) + ": " + what);
}

} // namespace

bool Raster::is_binary() const {
    return ((values == 0.0) || (values == 1.0)).all();
}

Raster read_raster(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) raster_error(1, "missing header");
    std::istringstream head(line);
    int nx = 0, ny = 0;
    if (!(head >> nx >> ny)) raster_error(1, "expected \"nx ny\"");
    if (!power_of_two(nx) || !power_of_two(ny))
        raster_error(1, "dimensions must be powers of two, got " +
                            std::to_string(nx) + " " + std::to_string(ny));
    Raster r;
    r.nx = nx;
    r.ny = ny;
    r.values.resize(nx, ny);
    for (int iy = 0; iy < ny; ++iy) {
        if (!std::getline(in, line)) raster_error(2 + iy, "missing row");
        std::istringstream row(line);
        for (int ix = 0; ix < nx; ++ix) {
            double v;
            if (!(row >> v)) raster_error(2 + iy, "expected " + std::to_string(nx) + " values");
            r.values(ix, iy) = v;
        }
        double extra;
        if (row >> extra) raster_error(2 + iy, "trailing values");
    }
    return r;
}

Raster read_raster_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open raster file: " + path);
    return read_raster(f);
}

std::string write_raster(const Raster& r) {
    std::ostringstream os;
    os << r.nx << " " << r.ny << "\n";
    char buf[48];
    for (int iy = 0; iy < r.ny; ++iy) {
        for (int ix = 0; ix < r.nx; ++ix) {
            std::snprintf(buf, sizeof buf, "%.12g", r.values(ix, iy));
            os << (ix ? " " : "") << buf;
        }
        os << "\n";
    }
    return os.str();
}

Raster composite_inclusions_raster(int n) {
    if (!power_of_two(n)) throw std::invalid_argument("raster size must be a power of two");
    Raster r;
    r.nx = r.ny = n;
    r.values = Eigen::ArrayXXd::Zero(n, n);
    for (int iy = 1; iy < n; iy += 2)
        for (int ix = 1; ix < n; ix += 2) r.values(ix, iy) = 1.0;
    return r;
}

Raster random_checkerboard_raster(int n, std::uint32_t seed) {
    if (!power_of_two(n)) throw std::invalid_argument("raster size must be a power of two");
    Raster r;
    r.nx = r.ny = n;
    r.values.resize(n, n);
    std::mt19937 rng(seed);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) r.values(ix, iy) = double(rng() & 1u);
    return r;
}

CoefficientField::CoefficientField(int level, int n) : level_(level) {
    mu_.resize(n);
    lambda_.resize(n);
    alpha_.resize(n);
    k11_.resize(n);
    k12_.resize(n);
    k22_.resize(n);
}

void CoefficientField::validate() const {
    if (mu_min() <= 0) throw std::invalid_argument("mu must be positive");
    if (lambda_min() < 0) throw std::invalid_argument("lambda must be nonnegative");
    if (alpha_min() < 0) throw std::invalid_argument("alpha must be nonnegative");
    if (kappa_min() <= 0) throw std::invalid_argument("kappa must be positive definite");
}

CoefficientField CoefficientField::constants(int level, double mu, double lambda,
                                             double alpha, double kappa) {
    TriMesh mesh(level);
    CoefficientField f(level, mesh.n_triangles());
    f.mu_.setConstant(mu);
    f.lambda_.setConstant(lambda);
    f.alpha_.setConstant(alpha);
    f.k11_.setConstant(kappa);
    f.k22_.setConstant(kappa);
    f.k12_.setConstant(0.0);
    f.validate();
    return f;
}

namespace {

/// raster cell of the fine cell containing triangle t
std::pair<int, int> raster_cell(const TriMesh& mesh, const Raster& r, int t) {
    auto [jx, jy, up] = mesh.triangle_coords(t);
    (void)up;  // both triangles of a cell share the raster cell
    return {jx * r.nx / mesh.cells(), jy * r.ny / mesh.cells()};
}

void check_alignment(int level, const Raster& r) {
    int N = 1 << level;
    if (r.nx > N || r.ny > N)
        throw std::invalid_argument("raster finer than mesh: " + std::to_string(r.nx) + "x" +
                                    std::to_string(r.ny) + " vs " + std::to_string(N) + " cells");
}

} // namespace

CoefficientField CoefficientField::two_phase(int level, const Raster& r,
                                             const Phase& background, const Phase& inclusion) {
    check_alignment(level, r);
    if (!r.is_binary()) throw std::invalid_argument("two-phase raster must be 0/1");
    TriMesh mesh(level);
    CoefficientField f(level, mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto [rx, ry] = raster_cell(mesh, r, t);
        const Phase& p = r.at(rx, ry) == 1.0 ? inclusion : background;
        f.mu_[t] = p.mu;
        f.lambda_[t] = p.lambda;
        f.alpha_[t] = p.alpha;
        f.k11_[t] = p.kappa;
        f.k22_[t] = p.kappa;
        f.k12_[t] = 0.0;
    }
    f.validate();
    return f;
}

CoefficientField CoefficientField::alpha_raster(int level, const Raster& alpha, double mu,
                                                double lambda, double kappa) {
    check_alignment(level, alpha);
    TriMesh mesh(level);
    CoefficientField f(level, mesh.n_triangles());
    f.mu_.setConstant(mu);
    f.lambda_.setConstant(lambda);
    f.k11_.setConstant(kappa);
    f.k22_.setConstant(kappa);
    f.k12_.setConstant(0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto [rx, ry] = raster_cell(mesh, alpha, t);
        f.alpha_[t] = alpha.at(rx, ry);
    }
    f.validate();
    return f;
}

Eigen::Matrix2d CoefficientField::kappa(int t) const {
    Eigen::Matrix2d k;
    k << k11_[t], k12_[t], k12_[t], k22_[t];
    return k;
}

double CoefficientField::kappa_min() const {
    double lo = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_elements(); ++t) {
        double mean = 0.5 * (k11_[t] + k22_[t]);
        double rad = std::hypot(0.5 * (k11_[t] - k22_[t]), k12_[t]);
        lo = std::min(lo, mean - rad);
    }
    return lo;
}

double CoefficientField::kappa_max() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_elements(); ++t) {
        double mean = 0.5 * (k11_[t] + k22_[t]);
        double rad = std::hypot(0.5 * (k11_[t] - k22_[t]), k12_[t]);
        hi = std::max(hi, mean + rad);
    }
    return hi;
}

std::uint64_t CoefficientField::content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    mix(&level_, sizeof level_);
    for (const Eigen::ArrayXd* a : {&mu_, &lambda_, &alpha_, &k11_, &k12_, &k22_})
        mix(a->data(), sizeof(double) * a->size());
    return h;
}

} // namespace lodthermo
