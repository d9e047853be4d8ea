#include <cmath>
#include <vector>

#include "doctest.h"

#include "bn6/errors.hpp"
#include "bn6/expansion.hpp"
#include "bn6/quadrature.hpp"
#include "support.hpp"

using namespace bn6;
using bn6::test::rel;
using bn6::test::unit_ball;

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(std::abs(y[i]));
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("expansion") {

TEST_CASE("ansatz center value matches its closed form") {
    const CriticalData& cd = unit_ball();
    for (double eps : {1e-2, -1e-3}) {
        const double d = cd.constants.d0;
        const AnsatzBundle b = assemble_ansatz(cd.ground_state, cd.v0, eps, d);
        const double delta = std::abs(eps) * d;
        const double want = cd.ground_state.max_value + eps * cd.v0.value(0.0) - 24.0 / (delta * delta) +
                            24.0 * delta * delta / std::pow(delta * delta + 1.0, 2);
        CHECK(b.eval(0.0, 0) == doctest::Approx(want).epsilon(1e-13));
        CHECK(b.w.value(0.0) == doctest::Approx(want).epsilon(1e-13));
        CHECK(std::abs(b.eval(1.0, 0)) < 1e-9);
        CHECK(b.lambda == doctest::Approx(cd.ground_state.lambda + eps).epsilon(1e-15));
    }
}

TEST_CASE("ansatz rejects eps = 0 and scales that are not small") {
    const CriticalData& cd = unit_ball();
    CHECK_THROWS_AS((void)assemble_ansatz(cd.ground_state, cd.v0, 0.0, 0.1), DomainError);
    ExpansionOptions o;
    o.sigma = 1e-3;
    CHECK_THROWS_AS((void)assemble_ansatz(cd.ground_state, cd.v0, 0.5, 5.0, o), ScaleTooLarge);
}

TEST_CASE("energy of the zero profile is zero") {
    const auto g = make_grid(1.0, 64, 1e-3);
    const RadialProfile z(g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0),
                          std::vector<double>(g.size(), 0.0));
    CHECK(energy(z, 5.0) == 0.0);
}

TEST_CASE("Nehari identity: J(u0) = (1/6) omega int u0^3 r^5") {
    const GroundState& gs = unit_ball().ground_state;
    const GaussLegendre g(10);
    const double cubic = omega6() * integrate_panels(gs.profile.nodes(), g, [&](double r) {
                             return std::pow(gs.profile.value(r), 3) * std::pow(r, 5);
                         });
    CHECK(rel(energy(gs.profile, gs.lambda), cubic / 6.0) < 1e-8);
}

TEST_CASE("energy of the projected bubble tends to (1/6) int U^3 at fourth order") {
    const double target = bubble_integrals().intU3 / 6.0;
    std::vector<double> ds, errs;
    for (double delta : {0.08, 0.04, 0.02}) {
        BubbleParams p;
        p.delta = delta;
        const RadialProfile pu = project_bubble_central(p, DomainBall(1.0));
        ds.push_back(delta);
        errs.push_back(energy(pu, 0.0) - target);
    }
    CHECK(std::abs(errs.back()) < 1e-3 * target);
    CHECK(loglog_slope(ds, errs) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("crossover radius over sqrt(delta) approaches R0") {
    const CriticalData& cd = unit_ball();
    const double R0 = cd.constants.R0;
    double prev_gap = INFINITY;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const AnsatzBundle b = assemble_ansatz(cd.ground_state, cd.v0, eps, cd.constants.d0);
        const double gap = std::abs(crossover_radius(b) / std::sqrt(b.params.delta) - R0) / R0;
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.02);
}

TEST_CASE("defect norm follows eps^2 |ln eps|^(2/3)") {
    const CriticalData& cd = unit_ball();
    double lo = INFINITY, hi = 0.0;
    for (double eps : {0.03, 0.003, 0.001}) {
        const AnsatzBundle b = assemble_ansatz(cd.ground_state, cd.v0, eps, cd.constants.d0);
        const double ratio = residual_l32(b) / (eps * eps * std::pow(std::abs(std::log(eps)), 2.0 / 3.0));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(hi < 2.0 * lo);
}

TEST_CASE("energy shift is computed as a difference, not by cancellation") {
    // J(W) - J(u0 + eps v0) against a direct difference of two large energies
    const CriticalData& cd = unit_ball();
    const double eps = 0.03;
    const AnsatzBundle b = assemble_ansatz(cd.ground_state, cd.v0, eps, cd.constants.d0);
    const double shift = ansatz_energy_shift(b);
    const auto smooth = sample_profile(b.w.nodes(), [&](double r, double& u, double& du, double& d2u) {
        u = b.smooth(r, 0);
        du = b.smooth(r, 1);
        d2u = b.smooth(r, 2);
    });
    const double naive = energy(b.w, b.lambda) - energy(smooth, b.lambda);
    CHECK(rel(naive, shift) < 1e-6);
}

TEST_CASE("I-terms: displayed I4, and the higher terms fall faster than eps^3") {
    const CriticalData& cd = unit_ball();
    const double d = cd.constants.d0;
    std::vector<double> es, i6, i7;
    for (double eps : {1e-2, 3e-3, 1e-3}) {
        const ITerms t = i_term_audit(cd.ground_state, cd.v0, cd.constants, eps, d);
        CHECK(t.i4_display == doctest::Approx(eps * eps * eps * d * d * cd.constants.a1 * (cd.constants.v0_at_center - 0.5)));
        es.push_back(eps);
        i6.push_back(t.i6);
        i7.push_back(t.i7);
    }
    CHECK(loglog_slope(es, i6) >= 3.9);
    CHECK(loglog_slope(es, i7) >= 3.9);
}

TEST_CASE("expansion sweep comes back sorted by (eps, d) with finite values") {
    const CriticalData& cd = unit_ball();
    const double d0 = cd.constants.d0;
    ExpansionOptions o;
    o.jobs = 2;
    const auto s = expansion_check(cd.ground_state, cd.v0, cd.constants, {3e-3, 1e-2}, {2 * d0, d0}, o);
    REQUIRE(s.size() == 4);
    for (std::size_t i = 1; i < s.size(); ++i)
        CHECK((s[i - 1].eps < s[i].eps || (s[i - 1].eps == s[i].eps && s[i - 1].d < s[i].d)));
    for (const auto& x : s) {
        CHECK(std::isfinite(x.upsilon_measured));
        CHECK(x.upsilon_predicted == doctest::Approx(upsilon(x.d, Point6{}, x.eps > 0 ? 1 : -1, cd.constants)));
    }
}

TEST_CASE("parallel and serial sweeps agree bit for bit") {
    const CriticalData& cd = unit_ball();
    const double d0 = cd.constants.d0;
    ExpansionOptions serial, par;
    par.jobs = 4;
    const auto a = expansion_check(cd.ground_state, cd.v0, cd.constants, {1e-2}, {0.5 * d0, d0, 2 * d0}, serial);
    const auto b = expansion_check(cd.ground_state, cd.v0, cd.constants, {1e-2}, {0.5 * d0, d0, 2 * d0}, par);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].j_value == b[i].j_value);
        CHECK(a[i].residual_l32 == b[i].residual_l32);
    }
}

}  // TEST_SUITE
