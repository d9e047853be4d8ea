#include "bn6/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "bn6/errors.hpp"

namespace bn6 {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

double to_real(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError(fmt::format("{}: expected a real number, got '{}'", key, v));
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, v));
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_real(key, trim(item)));
    return out;
}

std::string fmt_real(double x) { return fmt::format("{:.17g}", x); }

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_real(v[i]);
    return s;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "domain_radius") cfg.domain_radius = to_real(key, v);
    else if (key == "grid_n") {
        const long long n = to_integer(key, v);
        if (n < 16) throw ConfigError(fmt::format("grid_n: {} is too small", n));
        cfg.grid_n = static_cast<std::size_t>(n);
    } else if (key == "tol_bc") cfg.tol_bc = to_real(key, v);
    else if (key == "tol_eig") cfg.tol_eig = to_real(key, v);
    else if (key == "quad_tol") cfg.quad_tol = to_real(key, v);
    else if (key == "newton_tol") cfg.newton_tol = to_real(key, v);
    else if (key == "lambda0_tol") cfg.lambda0_tol = to_real(key, v);
    else if (key == "v00_tol") cfg.v00_tol = to_real(key, v);
    else if (key == "degree") cfg.degree = static_cast<int>(to_integer(key, v));
    else if (key == "eps_sweep") cfg.eps_sweep = to_list(key, v);
    else if (key == "d_grid") cfg.d_grid = to_list(key, v);
    else if (key == "sigma") cfg.sigma = to_real(key, v);
    else if (key == "ell_max") cfg.ell_max = static_cast<int>(to_integer(key, v));
    else if (key == "eigen_count") cfg.eigen_count = static_cast<int>(to_integer(key, v));
    else if (key == "output_dir") cfg.output_dir = v;
    else if (key == "branch_eps0") cfg.branch_eps0 = to_real(key, v);
    else if (key == "branch_eps_min") cfg.branch_eps_min = to_real(key, v);
    else if (key == "branch_steps_per_decade") cfg.branch_steps_per_decade = static_cast<int>(to_integer(key, v));
    else if (key == "branch_seed_d") cfg.branch_seed_d = to_list(key, v);
    else if (key == "branch_dichotomy") cfg.branch_dichotomy = to_bool(key, v);
    else throw ConfigError(fmt::format("unknown key '{}'", key));
}

void RunConfig::validate() const {
    auto positive = [](const char* name, double x) {
        if (!(x > 0.0)) throw ConfigError(fmt::format("{}: must be positive, got {}", name, x));
    };
    positive("domain_radius", domain_radius);
    positive("tol_bc", tol_bc);
    positive("tol_eig", tol_eig);
    positive("quad_tol", quad_tol);
    positive("newton_tol", newton_tol);
    positive("lambda0_tol", lambda0_tol);
    positive("v00_tol", v00_tol);
    if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError(fmt::format("sigma: must lie in (0, 1), got {}", sigma));
    if (degree < 4 || degree > 64) throw ConfigError(fmt::format("degree: {} outside [4, 64]", degree));
    if (ell_max < 0) throw ConfigError("ell_max: must be >= 0");
    if (eigen_count < 1) throw ConfigError("eigen_count: must be >= 1");
    if (eps_sweep.empty()) throw ConfigError("eps_sweep: empty");
    for (double e : eps_sweep)
        if (e == 0.0) throw ConfigError("eps_sweep: eps values must be nonzero");
    for (double d : d_grid) positive("d_grid", d);
    positive("branch_eps0", branch_eps0);
    positive("branch_eps_min", branch_eps_min);
    if (branch_eps_min > branch_eps0) throw ConfigError("branch_eps_min: exceeds branch_eps0");
    if (branch_steps_per_decade < 1) throw ConfigError("branch_steps_per_decade: must be >= 1");
    for (double d : branch_seed_d) positive("branch_seed_d", d);
}

std::vector<double> RunConfig::d_multiples() const {
    if (!d_grid.empty()) {
        std::vector<double> g(d_grid);
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        return g;
    }
    std::vector<double> g;
    for (int k = 2; k <= 24; ++k) g.push_back(0.125 * k);
    return g;
}

std::vector<double> RunConfig::branch_targets() const {
    std::vector<double> t;
    const double decades = std::log10(branch_eps0 / branch_eps_min);
    const int steps = static_cast<int>(std::ceil(decades * branch_steps_per_decade - 1e-9));
    for (int k = 1; k <= steps; ++k) {
        const double e = branch_eps0 * std::pow(10.0, -static_cast<double>(k) / branch_steps_per_decade);
        t.push_back(std::max(e, branch_eps_min));
    }
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
        apply_setting(cfg, trim(std::string_view(t).substr(0, eq)), t.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_environment(RunConfig& cfg) {
    if (const char* env = std::getenv("BN6_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
}

std::string canonical_text(const RunConfig& c) {
    std::string s;
    auto line = [&s](const char* k, const std::string& v) { s += fmt::format("{} = {}\n", k, v); };
    line("domain_radius", fmt_real(c.domain_radius));
    line("grid_n", std::to_string(c.grid_n));
    line("tol_bc", fmt_real(c.tol_bc));
    line("tol_eig", fmt_real(c.tol_eig));
    line("quad_tol", fmt_real(c.quad_tol));
    line("newton_tol", fmt_real(c.newton_tol));
    line("lambda0_tol", fmt_real(c.lambda0_tol));
    line("v00_tol", fmt_real(c.v00_tol));
    line("degree", std::to_string(c.degree));
    line("eps_sweep", fmt_list(c.eps_sweep));
    line("d_grid", fmt_list(c.d_grid));
    line("sigma", fmt_real(c.sigma));
    line("ell_max", std::to_string(c.ell_max));
    line("eigen_count", std::to_string(c.eigen_count));
    line("branch_eps0", fmt_real(c.branch_eps0));
    line("branch_eps_min", fmt_real(c.branch_eps_min));
    line("branch_steps_per_decade", std::to_string(c.branch_steps_per_decade));
    line("branch_seed_d", fmt_list(c.branch_seed_d));
    line("branch_dichotomy", c.branch_dichotomy ? "true" : "false");
    return s;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string config_digest(const RunConfig& cfg) { return sha256_hex(canonical_text(cfg)); }

}  // namespace bn6
