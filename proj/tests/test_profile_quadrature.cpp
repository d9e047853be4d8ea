#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "bn6/errors.hpp"
#include "bn6/profile.hpp"
#include "bn6/quadrature.hpp"

using namespace bn6;

namespace {

RadialProfile cosine_profile(std::size_t n, bool with_curvature) {
    const auto nodes = make_grid(1.0, n, 1e-3);
    const double k = M_PI / 2;
    RadialProfile p = sample_profile(nodes, [&](double r, double& u, double& du, double& d2u) {
        u = std::cos(k * r);
        du = -k * std::sin(k * r);
        d2u = -k * k * std::cos(k * r);
    });
    if (!with_curvature) return RadialProfile({nodes.begin(), nodes.end()}, {p.values().begin(), p.values().end()},
                                              {p.derivs().begin(), p.derivs().end()});
    return p;
}

double interp_error(const RadialProfile& p) {
    double e = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double r = i / 2000.0;
        e = std::max(e, std::abs(p.value(r) - std::cos(M_PI / 2 * r)));
    }
    return e;
}

}  // namespace

TEST_SUITE("profile") {

TEST_CASE("grid: n intervals, starts at 0, ends at R, strictly increasing") {
    const auto g = make_grid(2.0, 64, 1e-4);
    REQUIRE(g.size() == 65);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(2.0).epsilon(1e-15));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK(g[1] <= 2e-4);
    CHECK_THROWS_AS((void)make_grid(1.0, 4, 1e-3), DomainError);
    CHECK_THROWS_AS((void)make_grid(-1.0, 64, 1e-3), DomainError);
}

TEST_CASE("write then read keeps every value bit for bit") {
    const RadialProfile p = cosine_profile(128, true);
    std::stringstream ss;
    write_profile(ss, p);
    std::string header;
    std::getline(ss, header);
    CHECK(header.rfind("# bn6 radial-profile R=", 0) == 0);
    CHECK(header.find("N=128") != std::string::npos);
    ss.seekg(0);
    const RadialProfile q = read_profile(ss);
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q.nodes()[i] == p.nodes()[i]);
        CHECK(q.values()[i] == p.values()[i]);
        CHECK(q.derivs()[i] == p.derivs()[i]);
    }
}

TEST_CASE("malformed profile text is rejected") {
    std::istringstream no_header("0 1 0\n1 0 0\n");
    CHECK_THROWS_AS((void)read_profile(no_header), DomainError);
    std::istringstream short_rows("# bn6 radial-profile R=1 N=3\n0 1 0\n1 0 0\n");
    CHECK_THROWS_AS((void)read_profile(short_rows), DomainError);
}

TEST_CASE("structural invariants are enforced") {
    CHECK_THROWS_AS(RadialProfile({0.0}, {1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS(RadialProfile({0.1, 1.0}, {1.0, 0.0}, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(RadialProfile({0.0, 0.5, 0.4}, {1.0, 0.5, 0.0}, {0.0, 0.0, 0.0}), DomainError);
    const RadialProfile p = cosine_profile(64, true);
    CHECK_NOTHROW(p.validate(1e-9));
    const RadialProfile bad({0.0, 1.0}, {1.0, 0.5}, {0.0, 0.0});
    CHECK_THROWS_AS(bad.validate(1e-9), DomainError);
    CHECK_THROWS_AS((void)p.value(1.5), DomainError);
}

TEST_CASE("quintic Hermite beats cubic and both converge at their order") {
    const double c1 = interp_error(cosine_profile(32, false)), c2 = interp_error(cosine_profile(64, false));
    const double q1 = interp_error(cosine_profile(32, true)), q2 = interp_error(cosine_profile(64, true));
    CHECK(std::log2(c1 / c2) >= 3.5);
    CHECK(std::log2(q1 / q2) >= 5.5);
    CHECK(q2 < c2);
}

TEST_CASE("interpolant is C1 across nodes") {
    const RadialProfile p = cosine_profile(40, true);
    const double r = p.nodes()[17];
    CHECK(p.deriv(r * (1 - 1e-12)) == doctest::Approx(p.deriv(r * (1 + 1e-12))).epsilon(1e-9));
}

TEST_CASE("sign changes and max_abs") {
    const auto nodes = make_grid(1.0, 200, 1e-3);
    const RadialProfile p = sample_profile(nodes, [](double r, double& u, double& du, double& d2u) {
        u = std::cos(3 * M_PI / 2 * r) * 2.0;
        du = -3 * M_PI * std::sin(3 * M_PI / 2 * r);
        d2u = -9 * M_PI * M_PI / 2 * std::cos(3 * M_PI / 2 * r);
    });
    CHECK(p.sign_changes() == 1);
    CHECK(p.max_abs() == doctest::Approx(2.0));
}

}  // TEST_SUITE

TEST_SUITE("quadrature") {

TEST_CASE("n-point Gauss-Legendre integrates degree 2n-1 exactly") {
    for (std::size_t n : {2u, 5u, 8u, 12u}) {
        const GaussLegendre g(n);
        double s = 0.0, w = 0.0;
        const int deg = static_cast<int>(2 * n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            s += g.weights[i] * std::pow(g.nodes[i], deg - 1);
            w += g.weights[i];
        }
        CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(s == doctest::Approx(2.0 / deg).epsilon(1e-13));
    }
}

TEST_CASE("composite panels integrate smooth functions to rounding") {
    const GaussLegendre g(8);
    const std::vector<double> br{0.0, 0.3, 1.0, 2.0};
    CHECK(integrate_panels(br, g, [](double x) { return std::exp(x); }) ==
          doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("adaptive integration handles an infinite range and reports failure") {
    CHECK(adaptive_integrate([](double x) { return std::exp(-x * x); }, 0.0, INFINITY, 1e-12) ==
          doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-12));
    CHECK_THROWS_AS((void)adaptive_integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)) * std::sin(1 / (x - 0.3)); },
                                             0.0, 1.0, 1e-15, 3),
                    QuadratureError);
}

TEST_CASE("breakpoint helpers") {
    const auto g = geometric_breaks(1e-4, 1.0, 4);
    CHECK(g.front() == doctest::Approx(1e-4));
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK(g.size() >= 17);
    const auto m = merge_breaks({{0.0, 0.5, 1.0}, {0.5 * (1 + 1e-15), 0.75, 2.0}}, 0.0, 1.0);
    CHECK(m == std::vector<double>{0.0, 0.5, 0.75, 1.0});
}

TEST_CASE("compensated sum recovers what naive summation loses") {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-10));
}

}  // TEST_SUITE
