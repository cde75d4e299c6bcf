#include "lodthermo/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lodthermo {

double h1_seminorm(const TriMesh& mesh, const DofMap& dm, const Eigen::VectorXd& v) {
    double acc = 0;
    int nc = dm.components();
    double area = mesh.tri_area();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        auto g = mesh.gradients(t);
        for (int c = 0; c < nc; ++c) {
            Eigen::Vector2d grad = Eigen::Vector2d::Zero();
            for (int i = 0; i < 3; ++i) {
                int gi = dm.dof(tri[i], c);
                if (gi >= 0) grad += v[gi] * g[i];
            }
            acc += area * grad.squaredNorm();
        }
    }
    return std::sqrt(acc);
}

double l2_norm(const TriMesh& mesh, const DofMap& dm, const Eigen::VectorXd& v) {
    // local mass pairing, constrained vertices contribute 0
    double acc = 0;
    int nc = dm.components();
    double a12 = mesh.tri_area() / 12.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle(t);
        for (int c = 0; c < nc; ++c) {
            double vv[3];
            for (int i = 0; i < 3; ++i) {
                int gi = dm.dof(tri[i], c);
                vv[i] = gi >= 0 ? v[gi] : 0.0;
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) acc += a12 * (i == j ? 2.0 : 1.0) * vv[i] * vv[j];
        }
    }
    return std::sqrt(std::max(acc, 0.0));
}

double h1_norm(const TriMesh& mesh, const DofMap& dm, const Eigen::VectorXd& v) {
    double a = l2_norm(mesh, dm, v), b = h1_seminorm(mesh, dm, v);
    return std::sqrt(a * a + b * b);
}

double relative_h1_error(const TriMesh& mesh, const DofMap& dm, const Eigen::VectorXd& v,
                         const Eigen::VectorXd& ref) {
    double denom = h1_seminorm(mesh, dm, ref);
    double num = h1_seminorm(mesh, dm, v - ref);
    if (denom == 0) return num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

double eoc(double e_coarse, double e_fine, double H_coarse, double H_fine) {
    return std::log(e_coarse / e_fine) / std::log(H_coarse / H_fine);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

std::string convergence_csv(const std::vector<LevelRecord>& rows) {
    std::ostringstream os;
    os << "H,k,rel_err_u,rel_err_theta,eoc_u,eoc_theta,wall_time_s\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << fmt(r.H) << "," << r.k << "," << fmt(r.rel_err_u) << "," << fmt(r.rel_err_theta)
           << ",";
        if (i > 0) {
            const auto& p = rows[i - 1];
            os << fmt(eoc(p.rel_err_u, r.rel_err_u, p.H, r.H)) << ","
               << fmt(eoc(p.rel_err_theta, r.rel_err_theta, p.H, r.H));
        } else {
            os << ",";
        }
        os << "," << fmt(r.wall_time_s) << "\n";
    }
    return os.str();
}

double mean_eoc(const std::vector<LevelRecord>& rows, bool theta) {
    if (rows.size() < 2) throw std::invalid_argument("mean_eoc needs at least two rows");
    double s = 0;
    for (size_t i = 1; i < rows.size(); ++i) {
        double ec = theta ? rows[i - 1].rel_err_theta : rows[i - 1].rel_err_u;
        double ef = theta ? rows[i].rel_err_theta : rows[i].rel_err_u;
        s += eoc(ec, ef, rows[i - 1].H, rows[i].H);
    }
    return s / (rows.size() - 1);
}

std::string history_csv(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& u,
                        const std::vector<Eigen::VectorXd>& theta) {
    if (times.size() != u.size() || times.size() != theta.size())
        throw std::invalid_argument("history columns differ in length");
    std::ostringstream os;
    os << "n,t,u_norm,theta_norm\n";
    for (size_t n = 0; n < times.size(); ++n)
        os << n << "," << fmt(times[n]) << "," << fmt(u[n].norm()) << "," << fmt(theta[n].norm())
           << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace lodthermo
