#include "lodthermo/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lodthermo {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(int line, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        fail(line, "'" + key + "' expects a number, got '" + value + "'");
    }
    if (!trim(value.substr(pos)).empty())
        fail(line, "'" + key + "' has trailing junk: '" + value + "'");
    return v;
}

long to_long(int line, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(value, &pos);
    } catch (const std::exception&) {
        fail(line, "'" + key + "' expects an integer, got '" + value + "'");
    }
    if (!trim(value.substr(pos)).empty())
        fail(line, "'" + key + "' has trailing junk: '" + value + "'");
    return v;
}

bool to_bool(int line, const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(line, "'" + key + "' expects true or false, got '" + value + "'");
}

std::vector<int> to_int_list(int line, const std::string& key, const std::string& value) {
    std::istringstream in(value);
    std::vector<int> out;
    std::string tok;
    while (in >> tok) out.push_back((int)to_long(line, key, tok));
    if (out.empty()) fail(line, "'" + key + "' expects a list of integers");
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_list(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(v[i]);
    }
    return s;
}

/// Dispatches one "key = value" onto the config; unknown keys are errors so
/// typos never silently fall back to defaults.
void apply(ExperimentConfig& c, const std::string& sec, int line, const std::string& key,
           const std::string& value) {
    auto d = [&] { return to_double(line, key, value); };
    auto i = [&] { return (int)to_long(line, key, value); };
    if (sec == "mesh") {
        if (key == "fine_level") c.fine_level = i();
        else if (key == "coarse_levels") c.coarse_levels = to_int_list(line, key, value);
        else if (key == "k") {
            std::istringstream in(value);
            std::string first;
            in >> first;
            if (first == "auto") {
                c.k_schedule.clear();
                c.k_c = 1.0;
                std::string rest;
                if (in >> rest) c.k_c = to_double(line, key, rest);
            } else {
                c.k_schedule = to_int_list(line, key, value);
            }
        } else fail(line, "unknown key '" + key + "' in [mesh]");
    } else if (sec == "boundary") {
        if (key == "type") c.boundary = value;
        else fail(line, "unknown key '" + key + "' in [boundary]");
    } else if (sec == "coefficients") {
        if (key == "type") c.coefficients = value;
        else if (key == "mu") c.mu = d();
        else if (key == "lambda") c.lambda = d();
        else if (key == "alpha") c.alpha = d();
        else if (key == "kappa") c.kappa = d();
        else if (key == "mu_inclusion") c.mu_inclusion = d();
        else if (key == "lambda_inclusion") c.lambda_inclusion = d();
        else if (key == "alpha_inclusion") c.alpha_inclusion = d();
        else if (key == "kappa_inclusion") c.kappa_inclusion = d();
        else if (key == "raster_n") c.raster_n = i();
        else if (key == "seed") c.seed = (std::uint32_t)to_long(line, key, value);
        else if (key == "alpha_low") c.alpha_low = d();
        else if (key == "alpha_high") c.alpha_high = d();
        else if (key == "raster_path") c.raster_path = value;
        else fail(line, "unknown key '" + key + "' in [coefficients]");
    } else if (sec == "data") {
        if (key == "f") {
            std::istringstream in(value);
            std::string a, b, rest;
            if (!(in >> a >> b) || (in >> rest))
                fail(line, "'f' expects two numbers, got '" + value + "'");
            c.f_x = to_double(line, key, a);
            c.f_y = to_double(line, key, b);
        } else if (key == "g") c.g = d();
        else if (key == "theta0") c.theta0 = value;
        else if (key == "theta0_scale") c.theta0_scale = d();
        else fail(line, "unknown key '" + key + "' in [data]");
    } else if (sec == "time") {
        if (key == "tau") c.tau = d();
        else if (key == "T") c.T = d();
        else fail(line, "unknown key '" + key + "' in [time]");
    } else if (sec == "run") {
        if (key == "out_dir") c.out_dir = value;
        else if (key == "threads") c.threads = i();
        else if (key == "alpha_correction") c.alpha_correction = to_bool(line, key, value);
        else if (key == "cache_dir") c.cache_dir = value;
        else if (key == "residual_tol") c.residual_tol = d();
        else fail(line, "unknown key '" + key + "' in [run]");
    } else {
        fail(line, "unknown section [" + sec + "]");
    }
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string raw, sec;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto cut = raw.find_first_of("#;");
        std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header '" + s + "'");
            sec = s.substr(1, s.size() - 2);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (sec.empty()) fail(line, "'" + key + "' appears before any [section]");
        apply(c, sec, line, key, value);
    }
    validate_config(c);
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

void validate_config(const ExperimentConfig& c) {
    if (c.fine_level < 1 || c.fine_level > 10)
        throw ConfigError("mesh.fine_level must be in [1, 10], got " +
                          std::to_string(c.fine_level));
    if (c.coarse_levels.empty()) throw ConfigError("mesh.coarse_levels must not be empty");
    for (std::size_t i = 0; i < c.coarse_levels.size(); ++i) {
        int m = c.coarse_levels[i];
        if (m < 1 || m > c.fine_level)
            throw ConfigError("mesh.coarse_levels entries must be in [1, fine_level], got " +
                              std::to_string(m));
        if (i && c.coarse_levels[i - 1] >= m)
            throw ConfigError("mesh.coarse_levels must be strictly increasing");
    }
    if (!c.k_schedule.empty()) {
        if (c.k_schedule.size() != c.coarse_levels.size())
            throw ConfigError("mesh.k schedule needs one entry per coarse level (" +
                              std::to_string(c.coarse_levels.size()) + "), got " +
                              std::to_string(c.k_schedule.size()));
        for (int k : c.k_schedule)
            if (k < 1) throw ConfigError("mesh.k entries must be >= 1");
    }
    if (!(c.k_c > 0)) throw ConfigError("mesh.k auto factor must be positive");
    if (c.boundary != "clamped-bottom" && c.boundary != "all-dirichlet")
        throw ConfigError("boundary.type must be clamped-bottom or all-dirichlet, got '" +
                          c.boundary + "'");
    if (c.coefficients != "constants" && c.coefficients != "composite" &&
        c.coefficients != "checkerboard" && c.coefficients != "raster-file")
        throw ConfigError(
            "coefficients.type must be constants, composite, checkerboard or raster-file, got '" +
            c.coefficients + "'");
    if (c.coefficients == "composite" || c.coefficients == "checkerboard") {
        if (!power_of_two(c.raster_n))
            throw ConfigError("coefficients.raster_n must be a power of two, got " +
                              std::to_string(c.raster_n));
        if (c.raster_n > (1 << c.fine_level))
            throw ConfigError("coefficients.raster_n exceeds the fine mesh resolution");
    }
    if (c.coefficients == "raster-file" && c.raster_path.empty())
        throw ConfigError("coefficients.raster_path is required for type raster-file");
    if (c.theta0 != "bubble" && c.theta0 != "zero")
        throw ConfigError("data.theta0 must be bubble or zero, got '" + c.theta0 + "'");
    if (!(c.tau > 0)) throw ConfigError("time.tau must be positive");
    if (!(c.T > 0)) throw ConfigError("time.T must be positive");
    long steps = std::lround(c.T / c.tau);
    if (steps < 1 || std::abs(steps * c.tau - c.T) > 1e-9 * std::max(1.0, c.T))
        throw ConfigError("time.T must be an integer multiple of time.tau");
    if (c.threads < 0) throw ConfigError("run.threads must be >= 0");
    if (!(c.residual_tol > 0)) throw ConfigError("run.residual_tol must be positive");
}

int config_steps(const ExperimentConfig& c) { return (int)std::lround(c.T / c.tau); }

int config_k(const ExperimentConfig& c, std::size_t idx) {
    if (!c.k_schedule.empty()) return c.k_schedule[idx];
    double log2_inv_H = c.coarse_levels[idx] - 0.5;  // H = sqrt(2) * 2^-level
    return std::max(1L, std::lround(c.k_c * log2_inv_H));
}

CoefficientField make_coefficients(const ExperimentConfig& c) {
    if (c.coefficients == "constants")
        return CoefficientField::constants(c.fine_level, c.mu, c.lambda, c.alpha, c.kappa);
    CoefficientField::Phase bg{c.mu, c.lambda, c.alpha, c.kappa};
    CoefficientField::Phase inc{c.mu_inclusion, c.lambda_inclusion, c.alpha_inclusion,
                                c.kappa_inclusion};
    if (c.coefficients == "composite")
        return CoefficientField::two_phase(c.fine_level, composite_inclusions_raster(c.raster_n),
                                           bg, inc);
    if (c.coefficients == "checkerboard") {
        Raster r = random_checkerboard_raster(c.raster_n, c.seed);
        Raster a = r;
        a.values = r.values * (c.alpha_high - c.alpha_low) + c.alpha_low;
        return CoefficientField::alpha_raster(c.fine_level, a, c.mu, c.lambda, c.kappa);
    }
    return CoefficientField::two_phase(c.fine_level, read_raster_file(c.raster_path), bg, inc);
}

BoundaryConfig make_boundary(const ExperimentConfig& c) {
    return c.boundary == "all-dirichlet" ? BoundaryConfig::all_dirichlet()
                                         : BoundaryConfig::clamped_bottom_theta_all();
}

void extend_to_full_scale(ExperimentConfig& c) {
    c.fine_level += 1;
    int next = c.coarse_levels.back() + 1;
    c.coarse_levels.push_back(next);
    if (!c.k_schedule.empty()) c.k_schedule.push_back(c.k_schedule.back() + 1);
    validate_config(c);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[mesh]\n";
    out << "fine_level = " << c.fine_level << "\n";
    out << "coarse_levels = " << fmt_list(c.coarse_levels) << "\n";
    if (c.k_schedule.empty())
        out << "k = auto " << fmt(c.k_c) << "\n";
    else
        out << "k = " << fmt_list(c.k_schedule) << "\n";
    out << "\n[boundary]\ntype = " << c.boundary << "\n";
    out << "\n[coefficients]\n";
    out << "type = " << c.coefficients << "\n";
    out << "mu = " << fmt(c.mu) << "\nlambda = " << fmt(c.lambda) << "\nalpha = " << fmt(c.alpha)
        << "\nkappa = " << fmt(c.kappa) << "\n";
    out << "mu_inclusion = " << fmt(c.mu_inclusion)
        << "\nlambda_inclusion = " << fmt(c.lambda_inclusion)
        << "\nalpha_inclusion = " << fmt(c.alpha_inclusion)
        << "\nkappa_inclusion = " << fmt(c.kappa_inclusion) << "\n";
    out << "raster_n = " << c.raster_n << "\nseed = " << c.seed << "\n";
    out << "alpha_low = " << fmt(c.alpha_low) << "\nalpha_high = " << fmt(c.alpha_high) << "\n";
    if (!c.raster_path.empty()) out << "raster_path = " << c.raster_path << "\n";
    out << "\n[data]\n";
    out << "f = " << fmt(c.f_x) << " " << fmt(c.f_y) << "\n";
    out << "g = " << fmt(c.g) << "\n";
    out << "theta0 = " << c.theta0 << "\ntheta0_scale = " << fmt(c.theta0_scale) << "\n";
    out << "\n[time]\ntau = " << fmt(c.tau) << "\nT = " << fmt(c.T) << "\n";
    out << "\n[run]\n";
    out << "out_dir = " << c.out_dir << "\n";
    out << "threads = " << c.threads << "\n";
    out << "alpha_correction = " << (c.alpha_correction ? "true" : "false") << "\n";
    if (!c.cache_dir.empty()) out << "cache_dir = " << c.cache_dir << "\n";
    out << "residual_tol = " << fmt(c.residual_tol) << "\n";
    return out.str();
}

} // namespace lodthermo
