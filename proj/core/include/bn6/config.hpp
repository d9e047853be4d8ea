#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bn6 {

struct RunConfig {
    double domain_radius = 1.0;
    std::size_t grid_n = 4096;
    double tol_bc = 1e-9;
    double tol_eig = 1e-6;
    double quad_tol = 1e-10;
    double newton_tol = 1e-11;
    double lambda0_tol = 1e-10;
    double v00_tol = 1e-4;
    int degree = 16;
    /// |eps| values; the sign comes from the computed theorem case.
    std::vector<double> eps_sweep{0.031622776601683791, 0.01, 0.0031622776601683794, 0.001};
    /// multiples of d0; empty means 0.25, 0.375, ..., 3.0
    std::vector<double> d_grid;
    double sigma = 0.01;
    int ell_max = 10;
    int eigen_count = 3;
    std::filesystem::path output_dir = "bn6-out";

    // branch
    double branch_eps0 = 1e-2;
    double branch_eps_min = 0.00031622776601683794;
    int branch_steps_per_decade = 4;
    /// extra seed candidates as multiples of d0, after {1/2, 1, 2}
    std::vector<double> branch_seed_d{0.25, 0.125};
    bool branch_dichotomy = true;  ///< also continue the opposite sign

    /// Checks the invariants; throws ConfigError.
    void validate() const;
    /// d_grid resolved to multiples of d0.
    [[nodiscard]] std::vector<double> d_multiples() const;
    /// Continuation targets |eps|, strictly below branch_eps0, down to branch_eps_min.
    [[nodiscard]] std::vector<double> branch_targets() const;
};

/// Flat `key = value` text; lists are comma-separated, `#` starts a comment.
/// Unknown keys and malformed values raise ConfigError.
[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
/// One `key = value` assignment on top of `cfg`.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text of every computational setting (output_dir excluded: it moves
/// files, not numbers). The digest is taken over exactly these bytes.
[[nodiscard]] std::string canonical_text(const RunConfig& cfg);
[[nodiscard]] std::string config_digest(const RunConfig& cfg);
[[nodiscard]] std::string sha256_hex(const std::string& bytes);

/// BN6_OUTPUT_DIR from the environment, if set and nonempty.
void apply_environment(RunConfig& cfg);

}  // namespace bn6
