#include <cmath>

#include "doctest.h"

#include "bn6/critical.hpp"
#include "bn6/errors.hpp"
#include "support.hpp"

using namespace bn6;
using bn6::test::kLambda0;
using bn6::test::kLambda1;
using bn6::test::rel;
using bn6::test::unit_ball;

TEST_SUITE("critical") {

TEST_CASE("f(lambda) = lambda - 2 u(0) changes sign inside (0, lambda1)") {
    const DomainBall unit(1.0);
    CHECK(lambda0_defect(0.01 * kLambda1, unit) < 0.0);
    CHECK(lambda0_defect(0.99 * kLambda1, unit) > 0.0);
}

TEST_CASE("lambda0 is certified with a small residual") {
    const CriticalData& cd = unit_ball();
    CHECK(cd.lambda0.lambda0 == doctest::Approx(kLambda0).epsilon(1e-11));
    CHECK(cd.lambda0.residual < 1e-8);
    CHECK(cd.lambda0.f_low < 0.0);
    CHECK(cd.lambda0.f_high > 0.0);
    REQUIRE(cd.lambda0.brackets.size() == 1);
    CHECK(cd.lambda0.brackets[0].first < cd.lambda0.lambda0);
    CHECK(cd.lambda0.brackets[0].second > cd.lambda0.lambda0);
    CHECK(std::abs(cd.lambda0.lambda0 - 2.0 * cd.ground_state.max_value) < 1e-8);
}

TEST_CASE("assumption report on the unit ball") {
    const AssumptionReport& r = unit_ball().report;
    CHECK(r.nondegenerate);
    REQUIRE(r.sector_min_abs_mu.size() == 11);
    for (double m : r.sector_min_abs_mu) CHECK(m > 1e-6);
    CHECK(r.v00_margin > 1e-4);
    CHECK(r.theorem_case == TheoremCase::positive_eps);
    CHECK(r.hessian_negative);
}

TEST_CASE("constants: a1 = 96 omega6, a2 = a1/2, a3 and its region algebra agree") {
    const ReducedEnergyConstants& c = unit_ball().constants;
    CHECK(rel(c.a1 / omega6(), 96.0) < 1e-12);
    CHECK(c.a2 == doctest::Approx(0.5 * c.a1).epsilon(1e-15));
    CHECK(rel(a3_region_algebra(c.u0_max), c.a3) < 1e-10);
    CHECK(c.R0 == doctest::Approx(std::pow(24.0 / c.u0_max, 0.25)).epsilon(1e-15));
    CHECK(c.sign_condition == doctest::Approx(1.0 - 2.0 * c.v0_at_center).epsilon(1e-15));
    CHECK(c.d0 == doctest::Approx(2.0 * c.a1 * std::abs(c.sign_condition) / (3.0 * c.a3)).epsilon(1e-15));
}

TEST_CASE("region algebra holds for any center value") {
    for (double u0 : {0.5, 3.0, 11.0, 40.0}) {
        const double want = (11.0 / 9.0) * omega6() * std::pow(24.0, 1.5) * std::pow(u0, 1.5);
        CHECK(rel(a3_region_algebra(u0), want) < 1e-12);
    }
}

TEST_CASE("Upsilon vanishes at d = 0 and is stationary at d0") {
    const ReducedEnergyConstants& c = unit_ball().constants;
    const Point6 zero{};
    CHECK(upsilon(0.0, zero, +1, c) == 0.0);
    const double h = 1e-6 * c.d0;
    const double slope = (upsilon(c.d0 + h, zero, +1, c) - upsilon(c.d0 - h, zero, +1, c)) / (2 * h);
    CHECK(std::abs(slope) < 1e-6 * std::abs(upsilon(c.d0, zero, +1, c)) / c.d0);
    CHECK(upsilon(c.d0, zero, +1, c) > 0.0);
    CHECK(upsilon(c.d0, zero, +1, c) > upsilon(0.8 * c.d0, zero, +1, c));
    CHECK(upsilon(c.d0, zero, +1, c) > upsilon(1.2 * c.d0, zero, +1, c));
}

TEST_CASE("Upsilon with the wrong eps sign is negative for every d > 0") {
    const ReducedEnergyConstants& c = unit_ball().constants;
    for (double m = 0.05; m < 5.0; m *= 1.3) CHECK(upsilon(m * c.d0, Point6{}, -1, c) < 0.0);
}

TEST_CASE("moving the center lowers Upsilon (negative Hessian direction)") {
    const ReducedEnergyConstants& c = unit_ball().constants;
    const Point6 eta{0.3, 0.0, -0.2, 0.0, 0.1, 0.0};
    CHECK(upsilon(c.d0, eta, +1, c) < upsilon(c.d0, Point6{}, +1, c));
}

TEST_CASE("argmax of Upsilon does not depend on rescaling a1 and a3 together") {
    ReducedEnergyConstants c = unit_ball().constants;
    const double d0 = c.d0;
    c.a1 *= 7.0;
    c.a2 *= 7.0;
    c.a3 *= 7.0;
    const double h = 1e-6 * d0;
    const double slope = (upsilon(d0 + h, Point6{}, +1, c) - upsilon(d0 - h, Point6{}, +1, c)) / (2 * h);
    CHECK(std::abs(slope) < 1e-6 * upsilon(d0, Point6{}, +1, c) / d0);
}

TEST_CASE("direct law: interior maximum only for its own eps sign") {
    const ReducedEnergyConstants& c = unit_ball().constants;
    const int s = c.eps_sign_direct;
    CHECK(s == -1);
    const double h = 1e-6 * c.d0_direct;
    const double slope = (upsilon_direct(c.d0_direct + h, s, c) - upsilon_direct(c.d0_direct - h, s, c)) / (2 * h);
    CHECK(std::abs(slope) < 1e-6 * std::abs(upsilon_direct(c.d0_direct, s, c)) / c.d0_direct);
    for (double m = 0.05; m < 5.0; m *= 1.3) CHECK(upsilon_direct(m * c.d0, -s, c) < 0.0);
}

TEST_CASE("sign condition tolerance is enforced") {
    const CriticalData& cd = unit_ball();
    CHECK_THROWS_AS((void)compute_constants(cd.ground_state, cd.v0, 100.0), AssumptionV00Violated);
}

TEST_CASE("a tolerance above the smallest eigenvalue reports degeneracy") {
    const CriticalData& cd = unit_ball();
    CriticalSettings cs;
    cs.solver.tol_eig = 100.0;
    cs.ell_max = 2;
    CHECK_THROWS_AS((void)analyze_at(cd.lambda0, DomainBall(1.0), cs), DegenerateLinearization);
}

}  // TEST_SUITE
