#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bn6/bubble.hpp"
#include "bn6/radial_bvp.hpp"

namespace bn6 {

enum class TheoremCase { positive_eps, negative_eps };

[[nodiscard]] std::string to_string(TheoremCase c);
[[nodiscard]] int eps_sign(TheoremCase c) noexcept;

struct ReducedEnergyConstants {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double R0 = 0.0;
    double u0_max = 0.0;
    double v0_at_center = 0.0;
    double sign_condition = 0.0;  ///< 1 - 2 v0(0)
    double d0 = 0.0;
    double hessian_scalar = 0.0;  ///< u0''(0)
    double lambda0 = 0.0;

    // First-principles re-derivation of the same expansion: the I4 limit is
    // -(a1/2) sgn(eps)(1 - 2 v0) d^2 and the inner region carries r^5/6, which
    // turns the cubic coefficient into (16/9) omega alpha^{3/2} u0^{3/2}.
    double a3_direct = 0.0;
    double d0_direct = 0.0;
    int eps_sign_direct = 0;  ///< sign of eps for which the direct law has an interior maximum
};

struct Lambda0Result {
    double lambda0 = 0.0;
    double residual = 0.0;  ///< |lambda0 - 2 u(0)|
    double lambda1 = 0.0;
    double f_low = 0.0;   ///< f at the lower end of the sweep
    double f_high = 0.0;  ///< f at the upper end of the sweep
    std::vector<std::pair<double, double>> brackets;
};

/// f(lambda) = lambda - 2 u_lambda(0) for the least-energy positive solution.
[[nodiscard]] double lambda0_defect(double lambda, const DomainBall& dom, double tol = 1e-12);

[[nodiscard]] Lambda0Result locate_lambda0(const DomainBall& dom, double tol);
[[nodiscard]] double find_lambda0(const DomainBall& dom, double tol);

/// Cubic coefficient rebuilt from the outside/inside region integrals
/// -(1/3)[-(1/3) a^3 R0^-6 w + 3 w a^2 R0^-2 u0] - (1/3)[-2 u0^3 w R0^6 + 3 a u0^2 w R0^2]
/// with R0 = (a/u0)^{1/4}; returned with its sign flipped (positive).
[[nodiscard]] double a3_region_algebra(double u0_max);

[[nodiscard]] ReducedEnergyConstants compute_constants(const GroundState& gs, const RadialProfile& v0,
                                                       double v00_tol = 1e-4);

/// sgn(eps)(1 - 2 v0) a1 d^2 + d^3 (a2 u0''(0) |eta|^2 - a3).
[[nodiscard]] double upsilon(double d, const Point6& eta, int eps_sign, const ReducedEnergyConstants& c);
/// -(a1/2) sgn(eps)(1 - 2 v0) d^2 - a3_direct d^3, the law the quadrature actually follows.
[[nodiscard]] double upsilon_direct(double d, int eps_sign, const ReducedEnergyConstants& c);

struct AssumptionReport {
    double lambda0 = 0.0;
    double fixed_point_residual = 0.0;
    bool nondegenerate = false;
    std::vector<double> sector_min_abs_mu;  ///< index ell
    double v00_margin = 0.0;
    TheoremCase theorem_case = TheoremCase::positive_eps;
    bool hessian_negative = false;
    std::vector<std::pair<double, double>> brackets;
};

/// Everything the expansion and branch stages consume.
struct CriticalData {
    Lambda0Result lambda0;
    GroundState ground_state;
    RadialProfile v0;
    ReducedEnergyConstants constants;
    std::vector<LinearizedSpectrum> spectra;  ///< ell = 0 .. ell_max
    AssumptionReport report;
};

struct CriticalSettings {
    SolverSettings solver;
    int ell_max = 10;
    int eigen_count = 3;
    double lambda0_tol = 1e-10;
    double v00_tol = 1e-4;
};

/// Runs the ground state, spectra and v0 at a known lambda0.
[[nodiscard]] CriticalData analyze_at(const Lambda0Result& l0, const DomainBall& dom, const CriticalSettings& cfg);
[[nodiscard]] CriticalData analyze_critical(const DomainBall& dom, const CriticalSettings& cfg = {});
[[nodiscard]] AssumptionReport assumption_report(const DomainBall& dom, const CriticalSettings& cfg = {});

}  // namespace bn6
