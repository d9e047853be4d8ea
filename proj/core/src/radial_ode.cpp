#include "bn6/radial_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "bn6/errors.hpp"

namespace bn6 {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 2>;
using Stepper = ode::runge_kutta_dopri5<State>;

struct Seed {
    double r0;
    State y0;
    double c2;
    double c4;
};

Seed taylor_seed(double s, double lambda, double radius) {
    const double g = std::abs(s) * s + lambda * s;
    const double c2 = -g / 12.0;
    const double c4 = -(2.0 * std::abs(s) + lambda) * c2 / 32.0;
    const double scale = 1.0 / std::sqrt(std::abs(s) + std::abs(lambda) + 1.0);
    const double r0 = 1e-3 * std::min(radius, scale);
    const double r2 = r0 * r0;
    return {r0, {s + c2 * r2 + c4 * r2 * r2, 2.0 * c2 * r0 + 4.0 * c4 * r2 * r0}, c2, c4};
}

struct LaneEmden {
    double lambda;
    void operator()(const State& y, State& dy, double r) const {
        dy[0] = y[1];
        dy[1] = -5.0 / r * y[1] - std::abs(y[0]) * y[0] - lambda * y[0];
    }
};

}  // namespace

ShotResult shoot(double s, double lambda, double radius, const ShootOptions& opt) {
    if (!(radius > 0.0)) throw DomainError("shoot: radius must be positive");
    const Seed seed = taylor_seed(s, lambda, radius);
    State y = seed.y0;
    ShotResult out;
    int last = s > 0 ? 1 : (s < 0 ? -1 : 0);
    auto observer = [&](const State& x, double r) {
        if (r >= radius) return;
        const int sg = x[0] > 0 ? 1 : (x[0] < 0 ? -1 : 0);
        if (sg != 0 && last != 0 && sg != last) ++out.sign_changes;
        if (sg != 0) last = sg;
    };
    const double atol = opt.atol_rel * std::max(std::abs(s), 1e-300);
    ode::integrate_adaptive(ode::make_controlled(atol, opt.rtol, Stepper()), LaneEmden{lambda}, y, seed.r0, radius,
                            (radius - seed.r0) * 1e-4, observer);
    out.u_end = y[0];
    out.du_end = y[1];
    return out;
}

RadialProfile shoot_profile(double s, double lambda, std::span<const double> nodes, const ShootOptions& opt) {
    if (nodes.size() < 2 || nodes.front() != 0.0) throw DomainError("shoot_profile: nodes must start at 0");
    const double radius = nodes.back();
    const Seed seed = taylor_seed(s, lambda, radius);
    const std::size_t n = nodes.size();
    std::vector<double> u(n), du(n), d2u(n);
    std::size_t first = 0;
    while (first < n && nodes[first] <= seed.r0) {
        const double r = nodes[first];
        const double r2 = r * r;
        u[first] = s + seed.c2 * r2 + seed.c4 * r2 * r2;
        du[first] = 2.0 * seed.c2 * r + 4.0 * seed.c4 * r2 * r;
        d2u[first] = 2.0 * seed.c2 + 12.0 * seed.c4 * r2;
        ++first;
    }
    if (first < n) {
        std::vector<double> times;
        times.reserve(n - first + 1);
        times.push_back(seed.r0);
        for (std::size_t i = first; i < n; ++i) times.push_back(nodes[i]);
        State y = seed.y0;
        std::size_t k = 0;
        const LaneEmden rhs{lambda};
        auto observer = [&](const State& x, double r) {
            if (k++ == 0) return;  // the seed point itself
            const std::size_t i = first + k - 2;
            u[i] = x[0];
            du[i] = x[1];
            d2u[i] = -5.0 / r * x[1] - std::abs(x[0]) * x[0] - lambda * x[0];
        };
        const double atol = opt.atol_rel * std::max(std::abs(s), 1e-300);
        ode::integrate_times(ode::make_dense_output(atol, opt.rtol, Stepper()), rhs, y, times.begin(), times.end(),
                             (radius - seed.r0) * 1e-4, observer);
    }
    return RadialProfile(std::vector<double>(nodes.begin(), nodes.end()), std::move(u), std::move(du),
                         std::move(d2u));
}

SectorShot shoot_sector(const std::function<double(double)>& potential, int ell, double mu, double radius,
                        const ShootOptions& opt) {
    if (ell < 0) throw DomainError("shoot_sector: ell must be nonnegative");
    const double k = 2.0 * ell + 5.0;
    const double v0 = potential(0.0);
    const double c2 = -(v0 + mu) / (2.0 * (k + 1.0));
    const double r0 = 1e-4 * std::min(radius, 1.0 / std::sqrt(std::abs(v0) + std::abs(mu) + 1.0));
    State y{1.0 + c2 * r0 * r0, 2.0 * c2 * r0};
    auto rhs = [&](const State& x, State& dx, double r) {
        dx[0] = x[1];
        dx[1] = -k / r * x[1] - (potential(r) + mu) * x[0];
    };
    SectorShot out;
    int last = 1;
    auto observer = [&](const State& x, double r) {
        if (r >= radius) return;
        const int sg = x[0] > 0 ? 1 : (x[0] < 0 ? -1 : 0);
        if (sg != 0 && sg != last) {
            ++out.zeros;
            last = sg;
        }
    };
    ode::integrate_adaptive(ode::make_controlled(opt.atol_rel, opt.rtol, Stepper()), rhs, y, r0, radius,
                            (radius - r0) * 1e-4, observer);
    out.phi_end = y[0];
    return out;
}

}  // namespace bn6
