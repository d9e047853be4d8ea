#include "bn6/radial_bvp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "bn6/quadrature.hpp"
#include "bn6/radial_ode.hpp"

namespace bn6 {

namespace {

// Root of f on [a, b] with f(a) f(b) < 0, to (nearly) full double precision.
template <class F>
double bracket_root(F f, double a, double b, double fa, double fb) {
    std::uintmax_t iters = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (lo + hi);
}

double bisect_first_zero_j2() {
    double a = 3.0, b = 7.0;
    double fa = bessel_j2_series(a);
    for (int i = 0; i < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = bessel_j2_series(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// First r where |u(r) - u(0)| reaches half of |u(0)|; the profile's core scale.
double core_scale(const RadialProfile& p) {
    const auto r = p.nodes();
    const auto u = p.values();
    const double u0 = u[0];
    for (std::size_t i = 1; i < p.size(); ++i)
        if (std::abs(u[i] - u0) >= 0.5 * std::abs(u0)) return r[i];
    return p.radius();
}

}  // namespace

double bessel_j2_series(double x) {
    const double h = 0.5 * x;
    const double h2 = h * h;
    double term = h2 / 2.0;  // k = 0: (x/2)^2 / (0! 2!)
    double sum = term;
    for (int k = 1; k < 80; ++k) {
        term *= -h2 / (static_cast<double>(k) * static_cast<double>(k + 2));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double first_eigenvalue(const DomainBall& dom) {
    static const double j21 = bisect_first_zero_j2();
    const double k = j21 / dom.radius;
    return k * k;
}

double positive_shooting_value(double lambda, const DomainBall& dom, double tol) {
    const double lam1 = first_eigenvalue(dom);
    if (!(lambda > 0.0))
        throw NoSolutionInRange(fmt::format("no positive solution for lambda = {} <= 0 (Pohozaev)", lambda));
    if (!(lambda < lam1))
        throw NoSolutionInRange(fmt::format("no positive solution for lambda = {} >= lambda1 = {}", lambda, lam1));
    const double R = dom.radius;
    auto uR = [&](double s) { return shoot(s, lambda, R).u_end; };

    // geometric sweep in s, 8 samples per decade, extending past the nominal
    // 1e3 ceiling (small lambda needs larger s)
    const double per_decade = 8.0;
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    double s_prev = 1e-3 / std::pow(R, 2.0);
    double f_prev = uR(s_prev);
    if (!(f_prev > 0.0)) throw BracketFailure(fmt::format("u(R; s={}) = {} is not positive", s_prev, f_prev));
    const double s_max = 1e9 / (R * R);
    for (double s = s_prev * ratio; s <= s_max * ratio; s *= ratio) {
        const double f = uR(s);
        if (f <= 0.0) {
            const double root = f == 0.0 ? s : bracket_root(uR, s_prev, s, f_prev, f);
            const ShotResult chk = shoot(root, lambda, R);
            if (chk.sign_changes != 0)
                throw BracketFailure(fmt::format("first bracket [{}, {}] holds a {}-node solution", s_prev, s,
                                                 chk.sign_changes));
            if (std::abs(chk.u_end) > tol * std::max(1.0, root))
                throw BracketFailure(fmt::format("shooting residual {:.3e} above tol at s = {}", chk.u_end, root));
            return root;
        }
        s_prev = s;
        f_prev = f;
    }
    throw BracketFailure(fmt::format("no sign change of u(R; s) for s in [1e-3, {:.1e}] at lambda = {}", s_max,
                                     lambda));
}

GroundState solve_positive(double lambda, const DomainBall& dom, double tol, const SolverSettings& cfg) {
    const double s = positive_shooting_value(lambda, dom, tol);
    GroundState gs;
    gs.lambda = lambda;
    gs.max_value = s;
    const double scale = 1.0 / std::sqrt(s + lambda);
    const auto grid = make_grid(dom.radius, cfg.grid_n, 1e-2 * std::min(scale, dom.radius));
    gs.profile = shoot_profile(s, lambda, grid);
    gs.shooting_residual = std::abs(gs.profile.values().back());
    const auto pot = [&](double r) { return 2.0 * std::abs(gs.profile.value(r)) + lambda; };
    gs.morse_index = shoot_sector(pot, 0, 0.0, dom.radius).zeros;
    gs.morse_data = sector_eigenvalues(gs, 0, 3);
    return gs;
}

LinearizedSpectrum sector_eigenvalues(const std::function<double(double)>& potential, double radius, int ell,
                                      int count, std::size_t resolution) {
    if (ell < 0) throw DomainError("sector_eigenvalues: ell must be >= 0");
    if (count < 1) throw DomainError("sector_eigenvalues: count must be >= 1");
    if (static_cast<std::size_t>(count) * 16 > resolution)
        throw ResolutionError(fmt::format("{} eigenvalues need more than {} profile intervals", count, resolution));
    double vmax = 0.0;
    for (int i = 0; i <= 64; ++i) vmax = std::max(vmax, std::abs(potential(radius * i / 64.0)));
    auto zeros = [&](double mu) { return shoot_sector(potential, ell, mu, radius); };

    double lo = -2.0 * vmax - 1.0;
    double hi = std::max(50.0 / (radius * radius), 1.0);
    while (zeros(hi).zeros < count) hi *= 2.0;

    LinearizedSpectrum out;
    out.sector = ell;
    for (int k = 1; k <= count; ++k) {
        double a = lo, b = hi;
        SectorShot sa = zeros(a), sb = zeros(b);
        // bisect on the zero count until the bracket holds exactly this eigenvalue
        for (int it = 0; it < 200; ++it) {
            if (sa.zeros == k - 1 && sb.zeros == k) break;
            const double m = 0.5 * (a + b);
            const SectorShot sm = zeros(m);
            if (sm.zeros >= k) {
                b = m;
                sb = sm;
            } else {
                a = m;
                sa = sm;
            }
        }
        const auto phi_end = [&](double mu) { return zeros(mu).phi_end; };
        double mu;
        if (sa.phi_end * sb.phi_end < 0.0) mu = bracket_root(phi_end, a, b, sa.phi_end, sb.phi_end);
        else mu = 0.5 * (a + b);
        out.eigenvalues.push_back(mu);
        lo = mu + 1e-12 * std::max(1.0, std::abs(mu));
    }
    return out;
}

LinearizedSpectrum sector_eigenvalues(const GroundState& gs, int ell, int count) {
    const auto pot = [&](double r) { return 2.0 * std::abs(gs.profile.value(r)) + gs.lambda; };
    return sector_eigenvalues(pot, gs.profile.radius(), ell, count, gs.profile.size() - 1);
}

RadialProfile solve_linearized(const GroundState& gs, const std::function<double(double)>& forcing,
                               const DomainBall& dom, double tol, const SolverSettings& cfg) {
    const ChebMesh mesh = graded_mesh(dom.radius, 0.1 * dom.radius, std::max(cfg.degree, 20), 1.35, 0.1);
    RadialProblem pb;
    pb.reaction = [&](double r, double v, double& f, double& df) {
        df = 2.0 * std::abs(gs.profile.value(r)) + gs.lambda;
        f = df * v + forcing(r);
    };
    CollocationOptions opt;
    opt.step_tol = std::min(tol, cfg.newton_tol);
    auto res = solve_collocation(mesh, pb, std::vector<double>(mesh.unknowns(), 0.0), opt);
    if (!res.converged || res.final_residual > tol) {
        const PiecewiseCheb sol(mesh, res.values);
        throw ConvergenceFailure(fmt::format("linear radial solve residual {:.3e}", res.final_residual),
                                 sol.to_profile(gs.profile.nodes()), res.residual_history);
    }
    const PiecewiseCheb sol(mesh, std::move(res.values));
    return sol.to_profile(gs.profile.nodes());
}

RadialProfile solve_v0(const GroundState& gs, const DomainBall& dom, double tol, const SolverSettings& cfg) {
    const LinearizedSpectrum sp = sector_eigenvalues(gs, 0, 3);
    for (double mu : sp.eigenvalues)
        if (std::abs(mu) <= cfg.tol_eig)
            throw DegenerateLinearization(fmt::format("ell = 0 linearization has eigenvalue {:.3e}", mu));
    return solve_linearized(gs, [&](double r) { return gs.profile.value(r); }, dom, tol, cfg);
}

CollocatedSolution solve_radial_collocation(double lambda, const RadialProfile& init, const DomainBall& dom,
                                            double tol, const SolverSettings& cfg) {
    const double R = dom.radius;
    if (std::abs(init.radius() - R) > 1e-12 * R) throw DomainError("initial guess lives on a different ball");
    const double core = std::min(0.5 * core_scale(init), 0.1 * R);
    const ChebMesh mesh = graded_mesh(R, core, cfg.degree, 1.35, 0.1);
    RadialProblem pb;
    pb.reaction = [lambda](double, double u, double& f, double& df) {
        f = std::abs(u) * u + lambda * u;
        df = 2.0 * std::abs(u) + lambda;
    };
    CollocationOptions opt;
    opt.step_tol = tol;
    auto res = solve_collocation(mesh, pb, sample_on_mesh(mesh, [&](double r) { return init.value(r); }), opt);
    const PiecewiseCheb sol(mesh, std::move(res.values));
    const auto grid = make_grid(R, cfg.grid_n, 0.05 * core);
    if (!res.converged)
        throw ConvergenceFailure(fmt::format("Newton stalled after {} steps (residual {:.3e})", res.iterations,
                                             res.final_residual),
                                 sol.to_profile(grid), res.residual_history);
    CollocatedSolution out;
    out.profile = sol.to_profile(grid);
    out.nodes = sol.sign_changes(1e-12);
    out.newton_steps = res.iterations;
    out.residual = res.final_residual;
    out.residual_history = std::move(res.residual_history);
    out.core = core;
    return out;
}

CollocatedSolution solve_sign_changing(double lambda, const RadialProfile& init, const DomainBall& dom, double tol,
                                       const SolverSettings& cfg) {
    if (init.sign_changes() == 0)
        throw NodeCountMismatch("solve_sign_changing: initial guess does not change sign", 0);
    CollocatedSolution out = solve_radial_collocation(lambda, init, dom, tol, cfg);
    if (out.nodes == 0) throw NodeCountMismatch("solve_sign_changing: converged to a one-signed solution", 0);
    return out;
}

double pohozaev_defect(const RadialProfile& u, double lambda) {
    const GaussLegendre gl(8);
    const double w6 = omega6();
    const double l2 = w6 * integrate_panels(u.nodes(), gl, [&](double r) {
        const double v = u.value(r);
        return v * v * std::pow(r, 5);
    });
    const double R = u.radius();
    const double du = u.derivs().back();
    const double lhs = lambda * l2;
    const double rhs = 0.5 * w6 * std::pow(R, 6) * du * du;
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

double strong_defect(const RadialProfile& u, double lambda) {
    if (!u.has_curvature()) throw DomainError("strong_defect: profile carries no curvature column");
    const auto r = u.nodes();
    const auto v = u.values();
    const auto dv = u.derivs();
    const auto d2v = u.curvature();
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double lap = r[i] == 0.0 ? 6.0 * d2v[i] : d2v[i] + 5.0 / r[i] * dv[i];
        worst = std::max(worst, std::abs(lap + std::abs(v[i]) * v[i] + lambda * v[i]));
    }
    const double m = u.max_abs();
    return worst / std::max(m * m, 1e-300);
}

}  // namespace bn6
