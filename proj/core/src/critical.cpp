#include "bn6/critical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "bn6/errors.hpp"

namespace bn6 {

std::string to_string(TheoremCase c) { return c == TheoremCase::positive_eps ? "positive_eps" : "negative_eps"; }

int eps_sign(TheoremCase c) noexcept { return c == TheoremCase::positive_eps ? 1 : -1; }

double lambda0_defect(double lambda, const DomainBall& dom, double tol) {
    return lambda - 2.0 * positive_shooting_value(lambda, dom, tol);
}

Lambda0Result locate_lambda0(const DomainBall& dom, double tol) {
    Lambda0Result out;
    out.lambda1 = first_eigenvalue(dom);
    const int K = 24;
    const double lo = 0.01, hi = 0.99;
    std::vector<double> lam(K + 1), f(K + 1);
    for (int k = 0; k <= K; ++k) {
        lam[static_cast<std::size_t>(k)] = out.lambda1 * (lo + (hi - lo) * k / K);
        f[static_cast<std::size_t>(k)] = lambda0_defect(lam[static_cast<std::size_t>(k)], dom);
    }
    out.f_low = f.front();
    out.f_high = f.back();
    if (!(out.f_low < 0.0) || !(out.f_high > 0.0))
        throw SignCertificationError(fmt::format("f({:.4g}) = {:.4g}, f({:.4g}) = {:.4g}: endpoint signs not certified",
                                                 lam.front(), out.f_low, lam.back(), out.f_high));
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k)
        if ((f[k] < 0.0) != (f[k + 1] < 0.0)) out.brackets.emplace_back(lam[k], lam[k + 1]);

    const auto [a, b] = out.brackets.front();
    const auto fn = [&](double l) { return lambda0_defect(l, dom); };
    std::uintmax_t iters = 200;
    const auto tolr = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 3);
    const std::size_t ia = static_cast<std::size_t>(std::find(lam.begin(), lam.end(), a) - lam.begin());
    const auto [x0, x1] = boost::math::tools::toms748_solve(fn, a, b, f[ia], f[ia + 1], tolr, iters);
    const double f0 = fn(x0);
    const double f1 = fn(x1);
    out.lambda0 = std::abs(f0) <= std::abs(f1) ? x0 : x1;
    out.residual = std::min(std::abs(f0), std::abs(f1));
    if (out.residual >= tol)
        throw SignCertificationError(fmt::format("lambda0 residual {:.3e} above tol {:.1e}", out.residual, tol));
    return out;
}

double find_lambda0(const DomainBall& dom, double tol) { return locate_lambda0(dom, tol).lambda0; }

double a3_region_algebra(double u0) {
    const double a = alpha6();
    const double w = omega6();
    const double R0 = std::pow(a / u0, 0.25);
    const double outside = -(1.0 / 3.0) * a * a * a * std::pow(R0, -6) * w + 3.0 * w * a * a * std::pow(R0, -2) * u0;
    const double inside = -2.0 * u0 * u0 * u0 * w * std::pow(R0, 6) + 3.0 * a * u0 * u0 * w * R0 * R0;
    return -(-(1.0 / 3.0) * outside - (1.0 / 3.0) * inside);
}

ReducedEnergyConstants compute_constants(const GroundState& gs, const RadialProfile& v0, double v00_tol) {
    const double a = alpha6();
    const double w = omega6();
    const BubbleIntegrals bi = bubble_integrals();
    ReducedEnergyConstants c;
    c.lambda0 = gs.lambda;
    c.u0_max = gs.max_value;
    c.v0_at_center = v0.value(0.0);
    c.sign_condition = 1.0 - 2.0 * c.v0_at_center;
    if (std::abs(c.sign_condition) < v00_tol)
        throw AssumptionV00Violated(fmt::format("|1 - 2 v0(0)| = {:.3e} below {:.1e}", c.sign_condition, v00_tol));
    c.a1 = a * a * bi.intW4;
    c.a2 = 0.5 * c.a1;
    c.a3 = (11.0 / 9.0) * w * std::pow(a, 1.5) * std::pow(c.u0_max, 1.5);
    c.R0 = std::pow(a / c.u0_max, 0.25);
    c.d0 = 2.0 * c.a1 / (3.0 * c.a3) * std::abs(c.sign_condition);
    c.hessian_scalar = gs.profile.second(0.0);
    c.a3_direct = (16.0 / 9.0) * w * std::pow(a, 1.5) * std::pow(c.u0_max, 1.5);
    c.d0_direct = c.a1 * std::abs(c.sign_condition) / (3.0 * c.a3_direct);
    c.eps_sign_direct = c.sign_condition > 0 ? -1 : 1;
    return c;
}

double upsilon(double d, const Point6& eta, int eps_sign, const ReducedEnergyConstants& c) {
    double eta2 = 0.0;
    for (double e : eta) eta2 += e * e;
    const double s = eps_sign > 0 ? 1.0 : -1.0;
    return s * c.sign_condition * d * d * c.a1 + d * d * d * (c.a2 * c.hessian_scalar * eta2 - c.a3);
}

double upsilon_direct(double d, int eps_sign, const ReducedEnergyConstants& c) {
    const double s = eps_sign > 0 ? 1.0 : -1.0;
    return -0.5 * c.a1 * s * c.sign_condition * d * d - c.a3_direct * d * d * d;
}

CriticalData analyze_at(const Lambda0Result& l0, const DomainBall& dom, const CriticalSettings& cfg) {
    CriticalData out;
    out.lambda0 = l0;
    out.ground_state = solve_positive(l0.lambda0, dom, 1e-10, cfg.solver);
    const GroundState& gs = out.ground_state;

    AssumptionReport& rep = out.report;
    rep.lambda0 = l0.lambda0;
    rep.fixed_point_residual = std::abs(l0.lambda0 - 2.0 * gs.max_value);
    rep.brackets = l0.brackets;
    rep.nondegenerate = true;
    for (int ell = 0; ell <= cfg.ell_max; ++ell) {
        out.spectra.push_back(sector_eigenvalues(gs, ell, cfg.eigen_count));
        double m = std::numeric_limits<double>::infinity();
        for (double mu : out.spectra.back().eigenvalues) m = std::min(m, std::abs(mu));
        rep.sector_min_abs_mu.push_back(m);
        if (!(m > cfg.solver.tol_eig)) rep.nondegenerate = false;
    }
    if (!rep.nondegenerate) {
        const auto it = std::min_element(rep.sector_min_abs_mu.begin(), rep.sector_min_abs_mu.end());
        throw DegenerateLinearization(fmt::format("sector ell = {} has |mu| = {:.3e} <= tol_eig",
                                                  it - rep.sector_min_abs_mu.begin(), *it));
    }
    out.v0 = solve_v0(gs, dom, 1e-9, cfg.solver);
    out.constants = compute_constants(gs, out.v0, cfg.v00_tol);
    rep.v00_margin = std::abs(out.constants.sign_condition);
    rep.theorem_case = out.constants.sign_condition > 0 ? TheoremCase::positive_eps : TheoremCase::negative_eps;
    rep.hessian_negative = out.constants.hessian_scalar < 0.0;
    return out;
}

CriticalData analyze_critical(const DomainBall& dom, const CriticalSettings& cfg) {
    return analyze_at(locate_lambda0(dom, cfg.lambda0_tol), dom, cfg);
}

AssumptionReport assumption_report(const DomainBall& dom, const CriticalSettings& cfg) {
    return analyze_critical(dom, cfg).report;
}

}  // namespace bn6
