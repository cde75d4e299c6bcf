#include <doctest.h>

#include "lodthermo/config.hpp"

#include <sstream>

using namespace lodthermo;

namespace {

ExperimentConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

/// Message of the ConfigError raised by parsing, or "" if none was thrown.
std::string error_of(const std::string& text) {
    try {
        parse_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& s, const std::string& sub) {
    return s.find(sub) != std::string::npos;
}

} // namespace

TEST_CASE("defaults validate and survive a serialize/parse round trip") {
    ExperimentConfig def;
    CHECK_NOTHROW(validate_config(def));

    std::string once = serialize_config(def);
    ExperimentConfig back = parse_text(once);
    CHECK(serialize_config(back) == once);

    CHECK(config_steps(def) == 20);
    CHECK(config_k(def, 0) == 1);
    CHECK(config_k(def, 2) == 2);
}

TEST_CASE("a full file with comments and odd whitespace parses") {
    std::string text =
        "# benchmark with random expansion contrast\n"
        "[mesh]\n"
        "fine_level = 4\r\n"
        "coarse_levels = 1 2\n"
        "  k =  auto 1.5   ; patch growth factor\n"
        "\n"
        "[boundary]\n"
        "type = all-dirichlet\n"
        "[coefficients]\n"
        "type = checkerboard\n"
        "raster_n = 8\n"
        "seed = 7\n"
        "alpha_low = 0.1\n"
        "alpha_high = 10\n"
        "[data]\n"
        "f = 1 1\n"
        "g = 10\n"
        "theta0 = bubble\n"
        "theta0_scale = 1\n"
        "[time]\n"
        "tau = 0.1\n"
        "T = 0.5\n"
        "[run]\n"
        "threads = 3\n"
        "alpha_correction = false\n";
    ExperimentConfig c = parse_text(text);
    CHECK(c.fine_level == 4);
    CHECK(c.coarse_levels == std::vector<int>{1, 2});
    CHECK(c.k_schedule.empty());
    CHECK(c.k_c == 1.5);
    CHECK(c.boundary == "all-dirichlet");
    CHECK(c.coefficients == "checkerboard");
    CHECK(c.seed == 7);
    CHECK(c.f_x == 1);
    CHECK(c.f_y == 1);
    CHECK(c.g == 10);
    CHECK(c.theta0_scale == 1);
    CHECK(c.tau == 0.1);
    CHECK(config_steps(c) == 5);
    CHECK(c.threads == 3);
    CHECK(!c.alpha_correction);

    // auto rule: k = max(1, round(k_c * (level - 1/2)))
    CHECK(config_k(c, 0) == 1);
    CHECK(config_k(c, 1) == 2);

    std::string normal = serialize_config(c);
    CHECK(serialize_config(parse_text(normal)) == normal);
}

TEST_CASE("syntax errors carry line numbers and field names") {
    CHECK(contains(error_of("[mesh]\nbogus = 1\n"), "line 2"));
    CHECK(contains(error_of("[mesh]\nbogus = 1\n"), "unknown key 'bogus'"));
    CHECK(contains(error_of("[nope]\nx = 1\n"), "unknown section [nope]"));
    CHECK(contains(error_of("fine_level = 4\n"), "before any [section]"));
    CHECK(contains(error_of("[mesh]\nfine_level four\n"), "expected 'key = value'"));
    CHECK(contains(error_of("[mesh]\nfine_level = four\n"), "expects an integer"));
    CHECK(contains(error_of("[time]\ntau = 0.05x\n"), "trailing junk"));
    CHECK(contains(error_of("[data]\nf = 1\n"), "'f' expects two numbers"));
    CHECK(contains(error_of("[run]\nalpha_correction = maybe\n"), "expects true or false"));
    CHECK(contains(error_of("[mesh\nfine_level = 4\n"), "unterminated section"));
}

TEST_CASE("validation names the offending field") {
    CHECK(contains(error_of("[mesh]\nfine_level = 0\n"), "mesh.fine_level"));
    CHECK(contains(error_of("[mesh]\nfine_level = 3\ncoarse_levels = 1 4\n"),
                   "mesh.coarse_levels"));
    CHECK(contains(error_of("[mesh]\ncoarse_levels = 2 2\n"), "strictly increasing"));
    CHECK(contains(error_of("[mesh]\ncoarse_levels = 1 2\nk = 1\n"), "one entry per coarse level"));
    CHECK(contains(error_of("[mesh]\nk = 0 1 1 1\n"), "mesh.k"));
    CHECK(contains(error_of("[boundary]\ntype = periodic\n"), "boundary.type"));
    CHECK(contains(error_of("[coefficients]\ntype = magic\n"), "coefficients.type"));
    CHECK(contains(error_of("[coefficients]\nraster_n = 3\n"), "power of two"));
    CHECK(contains(error_of("[mesh]\nfine_level = 2\ncoarse_levels = 1 2\nk = 1 1\n"
                            "[coefficients]\nraster_n = 8\n"),
                   "exceeds the fine mesh resolution"));
    CHECK(contains(error_of("[coefficients]\ntype = raster-file\n"), "coefficients.raster_path"));
    CHECK(contains(error_of("[data]\ntheta0 = spike\n"), "data.theta0"));
    CHECK(contains(error_of("[time]\ntau = -0.05\n"), "time.tau"));
    CHECK(contains(error_of("[time]\ntau = 0.3\nT = 1\n"), "integer multiple"));
    CHECK(contains(error_of("[run]\nthreads = -2\n"), "run.threads"));
}

TEST_CASE("missing config file raises a config error") {
    CHECK_THROWS_AS(parse_config_file("/no/such/file.cfg"), ConfigError);
}

TEST_CASE("coefficient factory realizes each field type") {
    ExperimentConfig c;
    c.fine_level = 3;
    c.raster_n = 4;

    c.coefficients = "constants";
    c.mu = 2;
    auto f1 = make_coefficients(c);
    CHECK(f1.n_elements() == 128);
    CHECK(f1.mu(0) == 2);
    CHECK(f1.mu(127) == 2);

    c.coefficients = "composite";
    auto f2 = make_coefficients(c);
    int inclusions = 0;
    for (int t = 0; t < f2.n_elements(); ++t)
        if (f2.mu(t) == 10) ++inclusions;
    // 4 of the 16 raster cells are inclusions; each covers 8 fine triangles
    CHECK(inclusions == 32);

    c.coefficients = "checkerboard";
    c.alpha_low = 0.1;
    c.alpha_high = 10;
    auto f3 = make_coefficients(c);
    bool low = false, high = false;
    for (int t = 0; t < f3.n_elements(); ++t) {
        CHECK(f3.mu(t) == 2);
        CHECK((f3.alpha(t) == 0.1 || f3.alpha(t) == 10));
        low |= f3.alpha(t) == 0.1;
        high |= f3.alpha(t) == 10;
    }
    CHECK(low);
    CHECK(high);

    c.seed = 43;
    auto f4 = make_coefficients(c);
    bool differs = false;
    for (int t = 0; t < f3.n_elements(); ++t) differs |= f3.alpha(t) != f4.alpha(t);
    CHECK(differs);
}

TEST_CASE("boundary factory maps the two supported setups") {
    ExperimentConfig c;
    c.boundary = "clamped-bottom";
    auto b1 = make_boundary(c);
    CHECK(b1.dirichlet_u == std::set<Side>{Side::bottom});
    CHECK(b1.dirichlet_theta.size() == 4);

    c.boundary = "all-dirichlet";
    auto b2 = make_boundary(c);
    CHECK(b2.dirichlet_u.size() == 4);
}

TEST_CASE("full-scale extension appends one level to the schedule") {
    ExperimentConfig c;  // desk defaults: fine 5, coarse 1-4, k = 1 1 2 2
    extend_to_full_scale(c);
    CHECK(c.fine_level == 6);
    CHECK(c.coarse_levels == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(c.k_schedule == std::vector<int>{1, 1, 2, 2, 3});

    ExperimentConfig a;
    a.k_schedule.clear();  // automatic patch sizes stay automatic
    extend_to_full_scale(a);
    CHECK(a.k_schedule.empty());
    CHECK(config_k(a, 4) == 5);
}
