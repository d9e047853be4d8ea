#pragma once

#include <memory>
#include <vector>

#include "bn6/bubble.hpp"
#include "bn6/critical.hpp"
#include "bn6/profile.hpp"
#include "bn6/radial_bvp.hpp"

namespace bn6 {

/// W = u0 + eps v0 - P U_{|eps| d, 0} on the ball, kept in closed form for
/// quadrature and also sampled as a RadialProfile.
struct AnsatzBundle {
    double eps = 0.0;
    BubbleParams params;
    RadialProfile w;
    double lambda = 0.0;  ///< lambda0 + eps

    std::shared_ptr<const RadialProfile> u0;
    std::shared_ptr<const RadialProfile> v0;

    /// a = u0 + eps v0 and its derivatives (order 0..2).
    [[nodiscard]] double smooth(double r, int order) const;
    /// W and its derivatives (order 0..2), with the bubble part exact.
    [[nodiscard]] double eval(double r, int order) const;
    [[nodiscard]] CentralBubble bubble() const;
};

struct ExpansionOptions {
    double sigma = 0.01;
    double quad_tol = 1e-10;
    std::size_t grid_n = 4096;
    unsigned jobs = 1;
};

[[nodiscard]] AnsatzBundle assemble_ansatz(const GroundState& gs, const RadialProfile& v0, double eps, double d,
                                           const ExpansionOptions& opt = {});

/// omega int_0^R [u'^2/2 - lambda u^2/2 - |u|^3/3] r^5 dr by composite Gauss-Legendre
/// over the profile's own intervals, checked against a higher-order rule.
[[nodiscard]] double energy(const RadialProfile& u, double lambda, double quad_tol = 1e-10);

/// J(W) - J(u0 + eps v0), integrated as a difference so the large bubble
/// energy is never subtracted from itself.
[[nodiscard]] double ansatz_energy_shift(const AnsatzBundle& b, double quad_tol = 1e-10);

/// L^{3/2} norm of W'' + 5W'/r + |W|W + lambda W.
[[nodiscard]] double residual_l32(const AnsatzBundle& b, double quad_tol = 1e-10);

/// First zero of W moving out from the center; throws NotBlownUp if W(0) >= 0.
[[nodiscard]] double crossover_radius(const AnsatzBundle& b);

struct ExpansionSample {
    double eps = 0.0;
    double d = 0.0;
    double j_value = 0.0;
    double c0 = 0.0;
    double upsilon_measured = 0.0;
    double upsilon_predicted = 0.0;
    double upsilon_direct = 0.0;
    double residual_l32 = 0.0;
    double residual_ratio = 0.0;
};

/// eps * d sweep; samples come back sorted by (eps, d).
[[nodiscard]] std::vector<ExpansionSample> expansion_check(const GroundState& gs, const RadialProfile& v0,
                                                           const ReducedEnergyConstants& c,
                                                           const std::vector<double>& eps_list,
                                                           const std::vector<double>& d_grid,
                                                           const ExpansionOptions& opt = {});

struct ITerms {
    double eps = 0.0;
    double d = 0.0;
    double i2_excess = 0.0;  ///< I2 - (1/6) int U^3
    double i3 = 0.0;
    double i4 = 0.0;
    double i5 = 0.0;
    double i6 = 0.0;
    double i7 = 0.0;
    double i4_display = 0.0;  ///< eps^3 d^2 a1 (v0(0) - 1/2)
    double i5_display = 0.0;  ///< -(11/9) omega alpha^{3/2} u0^{3/2} |eps|^3 d^3
    double i5_direct = 0.0;   ///< -(16/9) omega alpha^{3/2} u0^{3/2} |eps|^3 d^3
    [[nodiscard]] double sum() const noexcept { return i2_excess + i3 + i4 + i5 + i6 + i7; }
};

[[nodiscard]] ITerms i_term_audit(const GroundState& gs, const RadialProfile& v0, const ReducedEnergyConstants& c,
                                  double eps, double d, const ExpansionOptions& opt = {});

}  // namespace bn6
