#include "bn6/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "bn6/errors.hpp"
#include "bn6/parallel.hpp"
#include "bn6/quadrature.hpp"

namespace bn6 {

namespace {

const GaussLegendre& rule_lo() {
    static const GaussLegendre g(8);
    return g;
}
const GaussLegendre& rule_hi() {
    static const GaussLegendre g(12);
    return g;
}

// Integral of f over the panels by the high-order rule; QuadratureError when the
// low-order rule disagrees by more than tol relative to the integral of |f|.
double integrate_checked(std::span<const double> breaks, const std::function<double(double)>& f, double tol,
                         const char* what) {
    CompensatedSum lo, hi, mag;
    for_each_panel_node(breaks, rule_lo(), [&](double x, double w) { lo.add(w * f(x)); });
    for_each_panel_node(breaks, rule_hi(), [&](double x, double w) {
        const double v = f(x);
        hi.add(w * v);
        mag.add(w * std::abs(v));
    });
    const double gap = std::abs(hi.value() - lo.value());
    if (gap > tol * std::max(mag.value(), std::numeric_limits<double>::min()))
        throw QuadratureError(fmt::format("{}: Gauss-Legendre orders 8/12 differ by {:.3e} (scale {:.3e}, tol {:.1e})",
                                          what, gap, mag.value(), tol));
    return hi.value();
}

double r5(double r) {
    const double r2 = r * r;
    return r2 * r2 * r;
}

// Panels resolving the bubble (64 per decade from delta/1000 up to R) merged with
// the smooth profile's nodes and any extra breakpoints.
std::vector<double> ansatz_breaks(const AnsatzBundle& b, std::vector<double> extra = {}) {
    const double R = b.u0->radius();
    const double lo = std::min(1e-3 * b.params.delta, 1e-3 * R);
    std::vector<double> u0n(b.u0->nodes().begin(), b.u0->nodes().end());
    return merge_breaks({geometric_breaks(lo, R, 64.0), std::move(u0n), std::move(extra)}, 0.0, R);
}

// 6 a P^2 - 2 P^3 (a >= P), 6 a^2 P - 2 a^3 (0 <= a < P), 0 (a < 0): the
// cubic remainder |a - P|^3 - |a|^3 - P^3 + 3 a P^2 + 3 |a| a P in closed form.
double cubic_remainder(double a, double p) {
    if (a >= p) return 6.0 * a * p * p - 2.0 * p * p * p;
    if (a >= 0.0) return 6.0 * a * a * p - 2.0 * a * a * a;
    return 0.0;
}

}  // namespace

double AnsatzBundle::smooth(double r, int order) const { return u0->eval(r, order) + eps * v0->eval(r, order); }

CentralBubble AnsatzBundle::bubble() const { return CentralBubble(params.delta, u0->radius()); }

double AnsatzBundle::eval(double r, int order) const {
    const CentralBubble pu = bubble();
    const double p = order == 0 ? pu.projected(r) : (order == 1 ? pu.bubble_deriv(r) : pu.bubble_second(r));
    return smooth(r, order) - p;
}

AnsatzBundle assemble_ansatz(const GroundState& gs, const RadialProfile& v0, double eps, double d,
                             const ExpansionOptions& opt) {
    if (eps == 0.0) throw DomainError("assemble_ansatz: eps must be nonzero");
    const double R = gs.profile.radius();
    AnsatzBundle b;
    b.eps = eps;
    b.params = BubbleParams::scaled(eps, d, Point6{}, Point6{}, opt.sigma);
    if (b.params.delta >= 0.5 * R)
        throw ScaleTooLarge(fmt::format("delta = {} is not small against R = {}", b.params.delta, R));
    b.lambda = gs.lambda + eps;
    b.u0 = std::make_shared<const RadialProfile>(gs.profile);
    b.v0 = std::make_shared<const RadialProfile>(v0);
    const auto grid = make_grid(R, opt.grid_n, 1e-2 * b.params.delta);
    b.w = sample_profile(grid, [&](double r, double& u, double& du, double& d2u) {
        u = b.eval(r, 0);
        du = b.eval(r, 1);
        d2u = b.eval(r, 2);
    });
    return b;
}

double energy(const RadialProfile& u, double lambda, double quad_tol) {
    const double J = integrate_checked(
        u.nodes(),
        [&](double r) {
            const double v = u.value(r);
            const double dv = u.deriv(r);
            return (0.5 * dv * dv - 0.5 * lambda * v * v - std::abs(v) * v * v / 3.0) * r5(r);
        },
        quad_tol, "energy");
    return omega6() * J;
}

double crossover_radius(const AnsatzBundle& b) {
    const double w0 = b.eval(0.0, 0);
    if (!(w0 < 0.0)) throw NotBlownUp(fmt::format("W(0) = {} is not negative", w0));
    const auto r = b.w.nodes();
    const auto w = b.w.values();
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (w[i] >= 0.0) {
            const auto f = [&](double x) { return b.eval(x, 0); };
            std::uintmax_t it = 200;
            const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 3);
            const auto [lo, hi] = boost::math::tools::toms748_solve(f, r[i - 1], r[i], f(r[i - 1]), f(r[i]), tol, it);
            return 0.5 * (lo + hi);
        }
    }
    throw NotBlownUp("W never changes sign");
}

double ansatz_energy_shift(const AnsatzBundle& b, double quad_tol) {
    std::vector<double> extra;
    try {
        extra.push_back(crossover_radius(b));
    } catch (const NotBlownUp&) {
    }
    const CentralBubble pu = b.bubble();
    const double lam = b.lambda;
    const auto breaks = ansatz_breaks(b, extra);
    const double J = integrate_checked(
        breaks,
        [&](double r) {
            const double a = b.smooth(r, 0);
            const double da = b.smooth(r, 1);
            const double p = pu.projected(r);
            const double dp = pu.bubble_deriv(r);
            const double w = a - p;
            const double grad = -da * dp + 0.5 * dp * dp;
            const double mass = -0.5 * lam * (p * p - 2.0 * a * p);
            const double cubic = (std::abs(w) * w * w - std::abs(a) * a * a) / 3.0;
            return (grad + mass - cubic) * r5(r);
        },
        quad_tol, "ansatz energy");
    return omega6() * J;
}

double residual_l32(const AnsatzBundle& b, double quad_tol) {
    const CentralBubble pu = b.bubble();
    const double lam = b.lambda;
    const auto breaks = ansatz_breaks(b);
    const double I = integrate_checked(
        breaks,
        [&](double r) {
            const double lap_a = b.smooth(r, 2) + 5.0 / r * b.smooth(r, 1);
            const double u = pu.bubble(r);
            const double a = b.smooth(r, 0);
            const double w = a - pu.projected(r);
            // Delta P U = -U^2 exactly; where W < 0, U^2 - W^2 = (2U - s) s with
            // s = U + W = a + shift, which keeps the core free of U^2 cancellation
            const double s = a + pu.shift();
            const double nonlin = w < 0.0 ? (2.0 * u - s) * s : u * u + w * w;
            const double defect = lap_a + nonlin + lam * w;
            return std::pow(std::abs(defect), 1.5) * r5(r);
        },
        // |defect|^(3/2) has kinks where the defect changes sign, so the two
        // rules agree only to a few 1e-6; the norm is a scaling diagnostic
        std::max(quad_tol, 1e-4), "ansatz residual");
    return std::pow(omega6() * I, 2.0 / 3.0);
}

std::vector<ExpansionSample> expansion_check(const GroundState& gs, const RadialProfile& v0,
                                             const ReducedEnergyConstants& c, const std::vector<double>& eps_list,
                                             const std::vector<double>& d_grid, const ExpansionOptions& opt) {
    std::vector<std::pair<double, double>> jobs;
    for (double e : eps_list)
        for (double d : d_grid) jobs.emplace_back(e, d);
    std::sort(jobs.begin(), jobs.end());
    const double intU3 = bubble_integrals().intU3;

    // c0 depends on eps only
    std::vector<double> eps_sorted(eps_list);
    std::sort(eps_sorted.begin(), eps_sorted.end());
    eps_sorted.erase(std::unique(eps_sorted.begin(), eps_sorted.end()), eps_sorted.end());
    std::vector<double> c0(eps_sorted.size());
    parallel_for(eps_sorted.size(), opt.jobs, [&](std::size_t i) {
        const double e = eps_sorted[i];
        const RadialProfile a = sample_profile(gs.profile.nodes(), [&](double r, double& u, double& du, double& d2u) {
            u = gs.profile.eval(r, 0) + e * v0.eval(r, 0);
            du = gs.profile.eval(r, 1) + e * v0.eval(r, 1);
            d2u = gs.profile.eval(r, 2) + e * v0.eval(r, 2);
        });
        c0[i] = energy(a, gs.lambda + e, opt.quad_tol) + intU3 / 6.0;
    });

    std::vector<ExpansionSample> out(jobs.size());
    parallel_for(jobs.size(), opt.jobs, [&](std::size_t i) {
        const auto [e, d] = jobs[i];
        const AnsatzBundle b = assemble_ansatz(gs, v0, e, d, opt);
        const std::size_t k =
            static_cast<std::size_t>(std::lower_bound(eps_sorted.begin(), eps_sorted.end(), e) - eps_sorted.begin());
        ExpansionSample s;
        s.eps = e;
        s.d = d;
        const double shift = ansatz_energy_shift(b, opt.quad_tol);
        s.c0 = c0[k];
        s.j_value = c0[k] - intU3 / 6.0 + shift;
        const double ae = std::abs(e);
        s.upsilon_measured = (shift - intU3 / 6.0) / (ae * ae * ae);
        const int sg = e > 0 ? 1 : -1;
        s.upsilon_predicted = upsilon(d, Point6{}, sg, c);
        s.upsilon_direct = upsilon_direct(d, sg, c);
        s.residual_l32 = residual_l32(b, opt.quad_tol);
        s.residual_ratio = s.residual_l32 / (e * e * std::pow(std::abs(std::log(ae)), 2.0 / 3.0));
        out[i] = s;
    });
    return out;
}

ITerms i_term_audit(const GroundState& gs, const RadialProfile& v0, const ReducedEnergyConstants& c, double eps,
                    double d, const ExpansionOptions& opt) {
    const AnsatzBundle b = assemble_ansatz(gs, v0, eps, d, opt);
    const CentralBubble pu = b.bubble();
    const double R = gs.profile.radius();
    const double w6 = omega6();
    const double lam0 = gs.lambda;
    std::vector<double> extra;
    try {
        extra.push_back(crossover_radius(b));
    } catch (const NotBlownUp&) {
    }
    const auto breaks = ansatz_breaks(b, extra);
    const auto integral = [&](const std::function<double(double)>& f, const char* what) {
        return w6 * integrate_checked(breaks, [&](double r) { return f(r) * r5(r); }, opt.quad_tol, what);
    };

    ITerms t;
    t.eps = eps;
    t.d = d;

    // I2 minus the whole-space bubble energy, rearranged so only small pieces are integrated:
    // -T_grad/2 + T_3/3 + c int_B U^2 - c^2 int_B U + c^3 |B| / 3 with T the exterior tails.
    {
        const double shift = pu.shift();
        const auto tail = [&](const std::function<double(double)>& f) {
            return w6 * adaptive_integrate([&](double r) { return f(r) * r5(r); }, R,
                                           std::numeric_limits<double>::infinity(), 1e-12);
        };
        const double t_grad = tail([&](double r) {
            const double g = pu.bubble_deriv(r);
            return g * g;
        });
        const double t_cube = tail([&](double r) {
            const double u = pu.bubble(r);
            return u * u * u;
        });
        const double u2 = integral([&](double r) { return pu.bubble(r) * pu.bubble(r); }, "I2 (U^2)");
        const double u1 = integral([&](double r) { return pu.bubble(r); }, "I2 (U)");
        const double ball = w6 * std::pow(R, 6) / 6.0;
        t.i2_excess = -0.5 * t_grad + t_cube / 3.0 + shift * u2 - shift * shift * u1 + shift * shift * shift * ball / 3.0;
    }
    t.i3 = integral(
        [&](double r) {
            const double p = pu.projected(r);
            return (gs.profile.value(r) - 0.5 * lam0) * p * p;
        },
        "I3");
    t.i4 = eps * integral(
                     [&](double r) {
                         const double p = pu.projected(r);
                         return (v0.value(r) - 0.5) * p * p;
                     },
                     "I4");
    t.i5 = -integral([&](double r) { return cubic_remainder(b.smooth(r, 0), pu.projected(r)); }, "I5") / 3.0;
    t.i6 = integral(
        [&](double r) {
            const double u = gs.profile.value(r);
            const double v = v0.value(r);
            const double a = u + eps * v;
            // |a| a - |u| u - 2 eps |u| v collapses to eps^2 v^2 where a, u >= 0
            const double bracket =
                (a >= 0.0 && u >= 0.0) ? eps * eps * v * v : std::abs(a) * a - std::abs(u) * u - 2.0 * eps * std::abs(u) * v;
            return bracket * pu.projected(r);
        },
        "I6");
    t.i7 = eps * eps * integral([&](double r) { return v0.value(r) * pu.projected(r); }, "I7");

    const double ae = std::abs(eps);
    const double a = alpha6();
    t.i4_display = eps * eps * eps * d * d * c.a1 * (c.v0_at_center - 0.5);
    t.i5_display = -(11.0 / 9.0) * w6 * std::pow(a, 1.5) * std::pow(c.u0_max, 1.5) * ae * ae * ae * d * d * d;
    t.i5_direct = -(16.0 / 9.0) * w6 * std::pow(a, 1.5) * std::pow(c.u0_max, 1.5) * ae * ae * ae * d * d * d;
    return t;
}

}  // namespace bn6
