#include <doctest.h>

#include "lodthermo/analysis.hpp"

#include <random>

using namespace lodthermo;

namespace {

Eigen::VectorXd random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1, 1);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

} // namespace

TEST_CASE("seminorm of linear functions is exact") {
    TriMesh m(3);
    DofMap dm(m, Field::scalar, {});
    auto vx = interpolate_scalar(m, dm, [](double x, double) { return x; });
    CHECK(h1_seminorm(m, dm, vx) == doctest::Approx(1.0).epsilon(1e-14));
    auto vc = interpolate_scalar(m, dm, [](double, double) { return 7.0; });
    CHECK(h1_seminorm(m, dm, vc) == doctest::Approx(0.0));
    auto vxy = interpolate_scalar(m, dm, [](double x, double y) { return 2 * x - 3 * y; });
    CHECK(h1_seminorm(m, dm, vxy) == doctest::Approx(std::sqrt(13.0)).epsilon(1e-14));
    // vector field: Frobenius gradient
    DofMap um(m, Field::vector2, {});
    auto w = interpolate_vector(m, um, [](double x, double y) { return Eigen::Vector2d(y, -x); });
    CHECK(h1_seminorm(m, um, w) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("seminorm squared equals Dirichlet energy with unit conductivity") {
    TriMesh m(2);
    DofMap dm(m, Field::scalar, {Side::left});
    auto coeff = CoefficientField::constants(2, 1, 1, 1, 1);
    auto A = assemble_thermal(m, coeff, dm);
    for (unsigned s = 0; s < 10; ++s) {
        Eigen::VectorXd v = random_vec(dm.n_dofs(), s);
        double energy = v.dot(A * v);
        double semi = h1_seminorm(m, dm, v);
        CHECK(semi * semi == doctest::Approx(energy).epsilon(1e-12));
    }
}

TEST_CASE("l2 norm matches mass energy and exact integrals") {
    TriMesh m(3);
    DofMap dm(m, Field::scalar, {});
    auto M = assemble_mass(m, dm);
    Eigen::VectorXd v = random_vec(dm.n_dofs(), 3);
    CHECK(l2_norm(m, dm, v) == doctest::Approx(std::sqrt(v.dot(M * v))).epsilon(1e-13));
    // ||x||_{L2} = 1/sqrt(3), and x is reproduced exactly by P1
    auto vx = interpolate_scalar(m, dm, [](double x, double) { return x; });
    CHECK(l2_norm(m, dm, vx) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(h1_norm(m, dm, vx) == doctest::Approx(std::sqrt(1.0 + 1.0 / 3.0)).epsilon(1e-13));
}

TEST_CASE("seminorm is a seminorm: homogeneous and subadditive") {
    TriMesh m(2);
    DofMap dm(m, Field::vector2, {Side::bottom});
    Eigen::VectorXd a = random_vec(dm.n_dofs(), 5), b = random_vec(dm.n_dofs(), 6);
    CHECK(h1_seminorm(m, dm, 3.5 * a) == doctest::Approx(3.5 * h1_seminorm(m, dm, a)).epsilon(1e-13));
    CHECK(h1_seminorm(m, dm, a + b) <= h1_seminorm(m, dm, a) + h1_seminorm(m, dm, b) + 1e-13);
}

TEST_CASE("relative error: zero for identical, symmetric denominators") {
    TriMesh m(2);
    DofMap dm(m, Field::scalar, {Side::bottom});
    Eigen::VectorXd v = random_vec(dm.n_dofs(), 9);
    CHECK(relative_h1_error(m, dm, v, v) == 0.0);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dm.n_dofs());
    CHECK(relative_h1_error(m, dm, z, z) == 0.0);
    CHECK(relative_h1_error(m, dm, 2 * v, v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eoc recovers known orders") {
    CHECK(eoc(0.4, 0.2, 0.1, 0.05) == doctest::Approx(1.0));
    CHECK(eoc(0.4, 0.1, 0.1, 0.05) == doctest::Approx(2.0));
    CHECK(eoc(0.4, 0.4, 0.1, 0.05) == doctest::Approx(0.0));
}

TEST_CASE("convergence csv layout and determinism") {
    std::vector<LevelRecord> rows{
        {1, std::sqrt(2.0) / 2, 1, 0.4, 0.2, 1.5},
        {2, std::sqrt(2.0) / 4, 1, 0.2, 0.1, 2.5},
    };
    auto csv = convergence_csv(rows);
    auto lines = [&] {
        std::vector<std::string> out;
        size_t pos = 0;
        while (pos < csv.size()) {
            size_t nl = csv.find('\n', pos);
            out.push_back(csv.substr(pos, nl - pos));
            pos = nl + 1;
        }
        return out;
    }();
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "H,k,rel_err_u,rel_err_theta,eoc_u,eoc_theta,wall_time_s");
    CHECK(lines[1].find(",,") != std::string::npos);  // no EOC on first row
    CHECK(lines[2].find(",1,") != std::string::npos);
    CHECK(lines[2].substr(lines[2].size() - 4) == ",2.5");
    CHECK(convergence_csv(rows) == csv);
    CHECK(mean_eoc(rows, false) == doctest::Approx(1.0));
    CHECK(mean_eoc(rows, true) == doctest::Approx(1.0));
}

TEST_CASE("history csv shape") {
    std::vector<double> tt{0.0, 0.5};
    std::vector<Eigen::VectorXd> u{Eigen::Vector2d(3, 4), Eigen::Vector2d(0, 0)};
    std::vector<Eigen::VectorXd> th{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 2)};
    auto csv = history_csv(tt, u, th);
    CHECK(csv == "n,t,u_norm,theta_norm\n0,0,5,1\n1,0.5,0,2\n");
    CHECK_THROWS_AS(history_csv({0.0}, u, th), std::invalid_argument);
}
