#include <cmath>
#include <vector>

#include "doctest.h"

#include "bn6/branch.hpp"
#include "bn6/errors.hpp"
#include "bn6/expansion.hpp"
#include "support.hpp"

using namespace bn6;
using bn6::test::unit_ball;

namespace {

BranchOptions dichotomy_options() {
    const ReducedEnergyConstants& c = unit_ball().constants;
    BranchOptions bo;
    bo.allow_any_sign = true;
    bo.extra_d = {0.25 * c.d0, 0.125 * c.d0};
    return bo;
}

// Seed on the eps < 0 side, where the reduced equation does change sign.
const BranchPoint& dichotomy_seed() {
    static const BranchPoint p = [] {
        const CriticalData& cd = unit_ball();
        return seed_branch(cd.ground_state, cd.v0, cd.constants, -1e-2, dichotomy_options());
    }();
    return p;
}

BranchPoint synthetic(double eps, double delta) {
    BranchPoint p;
    p.eps = eps;
    p.delta_extracted = delta;
    p.phi_norm_proxy = eps * eps;
    return p;
}

}  // namespace

TEST_SUITE("branch") {

TEST_CASE("fit recovers an exact linear law") {
    std::vector<BranchPoint> b;
    for (double e : {1e-2, 5e-3, 2e-3, 1e-3}) b.push_back(synthetic(e, 0.7 * e));
    const RateFit f = fit_blowup_rate(b, 0.7);
    CHECK(f.d_fitted == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.relative_gap < 1e-12);
    CHECK(f.remainder_slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.points == 4);
}

TEST_CASE("fit needs four points spanning a decade") {
    std::vector<BranchPoint> b{synthetic(1e-2, 7e-3), synthetic(5e-3, 3.5e-3), synthetic(2e-3, 1.4e-3)};
    CHECK_THROWS_AS((void)fit_blowup_rate(b, 0.7), FitError);
    b.push_back(synthetic(1.5e-3, 1.05e-3));
    CHECK_THROWS_AS((void)fit_blowup_rate(b, 0.7), FitError);
}

TEST_CASE("extract_delta recovers the scale of a synthetic ansatz") {
    const CriticalData& cd = unit_ball();
    for (double eps : {1e-2, -1e-3}) {
        const double d = cd.constants.d0;
        const AnsatzBundle b = assemble_ansatz(cd.ground_state, cd.v0, eps, d);
        const double delta = std::abs(eps) * d;
        CHECK(std::abs(extract_delta(b.w, cd.ground_state.max_value) / delta - 1.0) < 10.0 * std::abs(eps) * delta * delta + 1e-12);
    }
    const auto g = make_grid(1.0, 32, 1e-3);
    const RadialProfile positive = sample_profile(g, [](double r, double& u, double& du, double& d2u) {
        u = 2.0 - r * r;
        du = -2.0 * r;
        d2u = -2.0;
    });
    CHECK_THROWS_AS((void)extract_delta(positive, 2.0), NotBlownUp);
}

TEST_CASE("reduced multiplier keeps one sign for eps > 0 on [d0/8, 2 d0]") {
    // The measured outcome for the theorem sign: no root of c(d), so no seed.
    const CriticalData& cd = unit_ball();
    const double d0 = cd.constants.d0;
    for (double m : {0.125, 0.25, 0.5, 1.0, 2.0})
        CHECK(reduced_multiplier(cd.ground_state, cd.v0, 1e-2, m * d0) > 0.0);
    CHECK_THROWS_AS((void)seed_branch(cd.ground_state, cd.v0, cd.constants, 1e-2, dichotomy_options()), SeedFailure);
}

TEST_CASE("seeding checks the eps sign unless told otherwise") {
    const CriticalData& cd = unit_ball();
    CHECK_THROWS_AS((void)seed_branch(cd.ground_state, cd.v0, cd.constants, -1e-2), DomainError);
    CHECK_THROWS_AS((void)seed_branch(cd.ground_state, cd.v0, cd.constants, 0.0), DomainError);
}

TEST_CASE("eps < 0 seed: one node, small defects, blown-up center") {
    const BranchPoint& p = dichotomy_seed();
    CHECK(p.eps == doctest::Approx(-1e-2));
    CHECK(p.node_count == 1);
    CHECK(p.u_min < 0.0);
    CHECK(std::abs(p.pohozaev) < 1e-6);
    CHECK(p.strong_defect < 1e-6);
    CHECK(p.newton_residual < 1e-9);
    const double d = p.delta_extracted / std::abs(p.eps);
    CHECK(d > 0.5 * unit_ball().constants.d0_direct);
    CHECK(d < 2.0 * unit_ball().constants.d0_direct);
}

TEST_CASE("Newton restarted on an accepted point takes at most two steps") {
    const CriticalData& cd = unit_ball();
    const BranchPoint& p = dichotomy_seed();
    const BranchPoint q = solve_branch_point(cd.ground_state, cd.v0, p.eps, p.profile, dichotomy_options());
    CHECK(q.newton_steps <= 2);
    CHECK(q.delta_extracted == doctest::Approx(p.delta_extracted).epsilon(1e-6));
}

TEST_CASE("continuation to the start eps returns the start unchanged") {
    const CriticalData& cd = unit_ball();
    const BranchPoint& p = dichotomy_seed();
    const auto b = continue_branch(p, cd.ground_state, cd.v0, {p.eps}, dichotomy_options());
    REQUIRE(b.size() == 1);
    CHECK(b[0].eps == p.eps);
    CHECK(b[0].delta_extracted == p.delta_extracted);
}

TEST_CASE("continuation rejects targets of the wrong sign or moving away from 0") {
    const CriticalData& cd = unit_ball();
    const BranchPoint& p = dichotomy_seed();
    CHECK_THROWS_AS((void)continue_branch(p, cd.ground_state, cd.v0, {1e-3}, dichotomy_options()), DomainError);
    CHECK_THROWS_AS((void)continue_branch(p, cd.ground_state, cd.v0, {-2e-2}, dichotomy_options()), DomainError);
}

TEST_CASE("eps < 0 branch: delta linear in |eps|, remainder falls at second order, profile converges away from 0") {
    const CriticalData& cd = unit_ball();
    const BranchPoint& p = dichotomy_seed();
    const auto b = continue_branch(p, cd.ground_state, cd.v0, {-5.6234e-3, -3.1623e-3, -1.7783e-3, -1e-3},
                                   dichotomy_options());
    REQUIRE(b.size() == 5);
    for (const auto& q : b) CHECK(q.node_count == 1);
    const RateFit f = fit_blowup_rate(b, cd.constants.d0_direct);
    CHECK(f.r_squared > 0.999);
    CHECK(f.relative_gap < 0.05);
    CHECK(f.remainder_slope >= 1.8);

    // sup over r >= 0.3 of |u_eps - u0| shrinks roughly like |eps|
    auto far = [&](const BranchPoint& q) {
        double m = 0.0;
        for (int i = 0; i <= 70; ++i) {
            const double r = 0.3 + 0.01 * i;
            m = std::max(m, std::abs(q.profile.value(r) - cd.ground_state.profile.value(r)));
        }
        return m;
    };
    const double order = std::log(far(b.front()) / far(b.back())) / std::log(b.front().eps / b.back().eps);
    CHECK(order >= 0.9);
}

TEST_CASE("the located scale does not move when the collocation degree is raised") {
    const CriticalData& cd = unit_ball();
    const BranchPoint& p = dichotomy_seed();
    BranchOptions fine = dichotomy_options();
    fine.solver.degree = 32;
    const BranchPoint q = solve_branch_point_at(cd.ground_state, cd.v0, p.eps, p.delta_extracted / std::abs(p.eps), fine);
    CHECK(q.delta_extracted == doctest::Approx(p.delta_extracted).epsilon(0.01));
}

}  // TEST_SUITE
