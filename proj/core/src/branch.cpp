#include "bn6/branch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "bn6/quadrature.hpp"
#include "bn6/spectral.hpp"

namespace bn6 {

double extract_delta(const RadialProfile& u, double u0_center) {
    double m = u.values()[0];
    for (double v : u.values()) m = std::min(m, v);
    if (!(m < 0.0)) throw NotBlownUp(fmt::format("profile minimum {} is not negative", m));
    return std::sqrt(alpha6() / (u0_center - m));
}

double extract_delta(const BranchPoint& p, const GroundState& gs) { return extract_delta(p.profile, gs.max_value); }

double phi_norm_proxy(const RadialProfile& u, const GroundState& gs, const RadialProfile& v0, double eps, double delta) {
    const double R = u.radius();
    const CentralBubble pu(delta, R);
    std::vector<double> un(u.nodes().begin(), u.nodes().end());
    const auto breaks =
        merge_breaks({std::move(un), geometric_breaks(std::min(1e-3 * delta, 1e-3 * R), R, 64.0)}, 0.0, R);
    static const GaussLegendre gl(8);
    const double I = integrate_panels(breaks, gl, [&](double r) {
        const double dw = gs.profile.deriv(r) + eps * v0.deriv(r) - pu.bubble_deriv(r);
        const double g = u.deriv(r) - dw;
        return g * g * std::pow(r, 5);
    });
    return std::sqrt(omega6() * I);
}

namespace {

// W = a - P U on the ball, a = u0 + eps v0. The projection only subtracts the
// constant U(R), so W = b - U with b = a + shift, and everything about the
// bubble stays in closed form.
struct AnsatzField {
    const GroundState& gs;
    const RadialProfile& v0;
    double eps;
    double lambda;
    CentralBubble pu;

    AnsatzField(const GroundState& g, const RadialProfile& v, double e, double delta)
        : gs(g), v0(v), eps(e), lambda(g.lambda + e), pu(delta, g.profile.radius()) {}

    [[nodiscard]] double a(double r, int order = 0) const { return gs.profile.eval(r, order) + eps * v0.eval(r, order); }
    [[nodiscard]] double w(double r, int order = 0) const {
        if (order == 0) return a(r) - pu.projected(r);
        return a(r, order) - (order == 1 ? pu.bubble_deriv(r) : pu.bubble_second(r));
    }

    // W'' + 5W'/r + |W|W + lambda W. The smooth part uses the equations for u0
    // and v0, which give Delta a + lambda a = -a^2 + eps^2 (v0^2 + v0); the
    // bubble part uses Delta P U = -U^2. Near the core W < 0 and
    // U^2 - (U - b)^2 = (2U - b) b, so nothing of size U^2 is ever subtracted.
    [[nodiscard]] double residual(double r) const {
        const double u0 = gs.profile.value(r);
        const double v = v0.value(r);
        const double av = u0 + eps * v;
        const double U = pu.bubble(r);
        const double b = av + pu.shift();
        const double W = b - U;
        const double quad = W < 0.0 ? (2.0 * U - b) * b : U * U + W * W;
        return -av * av + eps * eps * (v * v + v) + quad - lambda * (U - pu.shift());
    }
};

// |W + p|(W + p) - |W|W without forming the squares when the sign is kept.
double power_increment(double W, double p) {
    const double u = W + p;
    if ((u >= 0.0) == (W >= 0.0)) return (W >= 0.0 ? 1.0 : -1.0) * (2.0 * W + p) * p;
    return std::abs(u) * u - std::abs(W) * W;
}

// delta with a(0) - U_delta(0) + U_delta(R) = u_center.
double center_delta(double a0, double u_center, double R) {
    const double gap = a0 - u_center;
    if (!(gap > 0.0)) throw NotBlownUp(fmt::format("center value {} is not below a(0) = {}", u_center, a0));
    const double al = alpha6();
    double d = std::sqrt(al / gap);
    for (int k = 0; k < 30; ++k) {
        const double q = d * d + R * R;
        const double g = al / (d * d) - al * d * d / (q * q) - gap;
        const double dg = -2.0 * al / (d * d * d) - 2.0 * al * d / (q * q) + 4.0 * al * d * d * d / (q * q * q);
        const double step = g / dg;
        d -= step;
        if (std::abs(step) <= 1e-15 * d) break;
    }
    return d;
}

ChebMesh remainder_mesh(double delta, double R, const SolverSettings& cfg) {
    return graded_mesh(R, 0.5 * delta, std::max(cfg.degree, 20), 1.35, 0.1);
}

struct RemainderSolution {
    PiecewiseCheb phi;
    int steps = 0;
    double residual = 0.0;
    double multiplier = 0.0;
};

// Newton for phi in W + phi on `mesh`. Bordered: adds c z with z a bubble-scale
// profile close to U times the scaling mode, and pins phi(0) = 0, which takes
// the nearly singular direction out of the solve.
RemainderSolution solve_remainder(const AnsatzField& f, const ChebMesh& mesh, std::vector<double> init,
                                  const SolverSettings& cfg, bool bordered) {
    const double R = f.gs.profile.radius();
    RadialProblem pb;
    pb.reaction = [&f](double r, double p, double& F, double& dF) {
        const double W = f.w(r);
        F = power_increment(W, p) + f.lambda * p + f.residual(r);
        dF = 2.0 * std::abs(W + p) + f.lambda;
    };
    if (bordered) {
        const double d2 = f.pu.delta() * f.pu.delta();
        const double U0 = f.pu.bubble(0.0);
        pb.border = [&f, d2, U0](double r) {
            const double q = f.pu.bubble(r) / U0;
            return q * q * (r * r - d2) / (r * r + d2);
        };
    }
    CollocationOptions opt;
    opt.step_tol = cfg.newton_tol;
    auto res = solve_collocation(mesh, pb, std::move(init), opt);
    PiecewiseCheb phi(mesh, std::move(res.values));
    if (!res.converged) {
        const auto grid = make_grid(R, cfg.grid_n, 0.05 * f.pu.delta());
        const RadialProfile last = sample_profile(grid, [&](double r, double& u, double& du, double& d2u) {
            u = f.w(r) + phi.eval(r, 0);
            du = f.w(r, 1) + phi.eval(r, 1);
            d2u = f.w(r, 2) + phi.eval(r, 2);
        });
        throw ConvergenceFailure(
            fmt::format("Newton stalled after {} steps (residual {:.3e})", res.iterations, res.final_residual), last,
            res.residual_history);
    }
    return {std::move(phi), res.iterations, res.final_residual, res.multiplier};
}

BranchPoint finish_point(const AnsatzField& f, const RemainderSolution& sol, int steps, const BranchOptions& opt) {
    const GroundState& gs = f.gs;
    const double R = gs.profile.radius();
    const double eps = f.eps;
    const PiecewiseCheb& phi = sol.phi;
    const auto grid = make_grid(R, opt.solver.grid_n, 0.05 * f.pu.delta());
    BranchPoint p;
    p.eps = eps;
    p.lambda = f.lambda;
    p.profile = sample_profile(grid, [&](double r, double& u, double& du, double& d2u) {
        u = f.w(r) + phi.eval(r, 0);
        du = f.w(r, 1) + phi.eval(r, 1);
        d2u = f.w(r, 2) + phi.eval(r, 2);
    });
    p.node_count = p.profile.sign_changes(1e-12);
    if (p.node_count != 1)
        throw NodeCountMismatch(fmt::format("eps = {}: converged to a {}-node solution", eps, p.node_count),
                                p.node_count);
    p.newton_residual = sol.residual;
    p.newton_steps = steps;
    p.u_min = f.w(0.0) + phi.eval(0.0);
    p.delta_extracted = std::sqrt(alpha6() / (gs.max_value - p.u_min));

    // H^1_0 norm of u - W at the extracted delta; the bubble difference is taken analytically
    const CentralBubble pe(p.delta_extracted, R);
    const auto breaks = merge_breaks(
        {std::vector<double>(phi.mesh().breaks().begin(), phi.mesh().breaks().end()),
         geometric_breaks(1e-3 * f.pu.delta(), R, 64.0)},
        0.0, R);
    static const GaussLegendre gl(8);
    const double I = integrate_panels(breaks, gl, [&](double r) {
        const double g = phi.eval(r, 1) - f.pu.bubble_deriv(r) + pe.bubble_deriv(r);
        return g * g * std::pow(r, 5);
    });
    p.phi_norm_proxy = std::sqrt(omega6() * I);
    p.pohozaev = pohozaev_defect(p.profile, p.lambda);
    p.strong_defect = strong_defect(p.profile, p.lambda);
    return p;
}

// Plain Newton in remainder form from W(eps, delta0) + phi_init, recentering the
// bubble on the computed center value between passes.
BranchPoint solve_near(const GroundState& gs, const RadialProfile& v0, double eps, double delta0,
                       std::function<double(double)> phi_init, const BranchOptions& opt) {
    const double R = gs.profile.radius();
    const double a0 = gs.profile.value(0.0) + eps * v0.value(0.0);
    double delta = delta0;
    int steps = 0;
    for (int pass = 0;; ++pass) {
        if (!(delta < 0.5 * R)) throw ScaleTooLarge(fmt::format("delta = {} is not small against R = {}", delta, R));
        const AnsatzField f(gs, v0, eps, delta);
        const ChebMesh mesh = remainder_mesh(delta, R, opt.solver);
        RemainderSolution sol = solve_remainder(f, mesh, sample_on_mesh(mesh, phi_init), opt.solver, false);
        steps += sol.steps;
        const double next = center_delta(a0, f.w(0.0) + sol.phi.eval(0.0), R);
        // an unbordered solve pins delta only to about residual x (scaling-mode
        // condition), near 1e-9 here; recentering below that just chases noise
        if (pass == 3 || std::abs(next - delta) <= 1e-8 * delta) return finish_point(f, sol, steps, opt);
        const CentralBubble old_pu = f.pu, new_pu(next, R);
        const PiecewiseCheb old_phi = sol.phi;
        phi_init = [old_pu, new_pu, old_phi](double r) {
            return old_phi.eval(r) + (new_pu.bubble(r) - old_pu.bubble(r)) - (new_pu.shift() - old_pu.shift());
        };
        delta = next;
    }
}

// c(d) at fixed eps on one mesh, warm-starting each solve from the last one.
class ReducedEquation {
public:
    ReducedEquation(const GroundState& gs, const RadialProfile& v0, double eps, double d_ref, const BranchOptions& opt)
        : gs_(gs), v0_(v0), eps_(eps), opt_(opt),
          mesh_(remainder_mesh(std::abs(eps) * d_ref, gs.profile.radius(), opt.solver)),
          warm_(mesh_.unknowns(), 0.0) {}

    double operator()(double d) { return solve(d).multiplier; }

    RemainderSolution solve(double d) {
        const double delta = std::abs(eps_) * d;
        if (!(delta < 0.5 * gs_.profile.radius()))
            throw ScaleTooLarge(fmt::format("delta = {} is not small against R = {}", delta, gs_.profile.radius()));
        const AnsatzField f(gs_, v0_, eps_, delta);
        RemainderSolution sol = [&] {
            try {
                return solve_remainder(f, mesh_, warm_, opt_.solver, true);
            } catch (const ConvergenceFailure&) {
                return solve_remainder(f, mesh_, std::vector<double>(mesh_.unknowns(), 0.0), opt_.solver, true);
            }
        }();
        warm_.assign(sol.phi.values().begin(), sol.phi.values().end());
        return sol;
    }

    // root in [lo, hi] followed by an unbordered Newton check of the result
    BranchPoint settle(double lo, double hi, double c_lo, double c_hi) {
        boost::uintmax_t iters = 80;
        const auto r = boost::math::tools::toms748_solve([this](double d) { return (*this)(d); }, lo, hi, c_lo, c_hi,
                                                         boost::math::tools::eps_tolerance<double>(44), iters);
        const double d = 0.5 * (r.first + r.second);
        root_ = d;
        const RemainderSolution bordered = solve(d);
        const AnsatzField f(gs_, v0_, eps_, std::abs(eps_) * d);
        const RemainderSolution plain = solve_remainder(
            f, mesh_, std::vector<double>(bordered.phi.values().begin(), bordered.phi.values().end()), opt_.solver,
            false);
        return finish_point(f, plain, plain.steps, opt_);
    }

    [[nodiscard]] double eps() const noexcept { return eps_; }
    /// d of the last settled root.
    [[nodiscard]] double root() const noexcept { return root_; }

private:
    const GroundState& gs_;
    const RadialProfile& v0_;
    double eps_;
    BranchOptions opt_;
    ChebMesh mesh_;
    std::vector<double> warm_;
    double root_ = 0.0;
};

// The discrete root moves with the mesh grading by about 1e-6 relative, which
// the near-singular scaling direction turns into several Newton steps when a
// solution is restarted on a mesh graded for its own delta. Settling once more
// on that mesh makes accepted points fixed points of the restart.
BranchPoint settle_on_own_mesh(ReducedEquation& eq, double lo, double hi, double c_lo, double c_hi,
                               const GroundState& gs, const RadialProfile& v0, const BranchOptions& opt) {
    (void)eq.settle(lo, hi, c_lo, c_hi);
    const double d1 = eq.root();
    ReducedEquation own(gs, v0, eq.eps(), d1, opt);
    const double c1 = own(d1);
    for (int k = 0; k <= 16; ++k) {
        const double f = 1.0 + 1e-5 * std::pow(2.0, k);
        for (double dn : {d1 / f, d1 * f}) {
            const double cn = own(dn);
            if ((cn > 0.0) != (c1 > 0.0)) return dn < d1 ? own.settle(dn, d1, cn, c1) : own.settle(d1, dn, c1, cn);
        }
    }
    throw BracketFailure(fmt::format("eps = {}: root d = {} lost on its own mesh", eq.eps(), d1));
}

}  // namespace

double reduced_multiplier(const GroundState& gs, const RadialProfile& v0, double eps, double d,
                          const BranchOptions& opt) {
    ReducedEquation eq(gs, v0, eps, d, opt);
    return eq(d);
}

BranchPoint solve_branch_point(const GroundState& gs, const RadialProfile& v0, double eps, const RadialProfile& init,
                               const BranchOptions& opt) {
    const double R = gs.profile.radius();
    if (std::abs(init.radius() - R) > 1e-12 * R) throw DomainError("initial guess lives on a different ball");
    if (init.sign_changes() == 0)
        throw NodeCountMismatch("solve_branch_point: initial guess does not change sign", 0);
    const double a0 = gs.profile.value(0.0) + eps * v0.value(0.0);
    const double delta = center_delta(a0, init.value(0.0), R);
    const CentralBubble pu(delta, R);
    return solve_near(
        gs, v0, eps, delta,
        [&gs, &v0, &init, pu, eps](double r) {
            return init.value(r) - (gs.profile.value(r) + eps * v0.value(r)) + pu.projected(r);
        },
        opt);
}

BranchPoint solve_branch_point_at(const GroundState& gs, const RadialProfile& v0, double eps, double d,
                                  const BranchOptions& opt) {
    (void)BubbleParams::scaled(eps, d, Point6{}, Point6{}, std::min(opt.sigma, 0.5 * d));
    ReducedEquation eq(gs, v0, eps, d, opt);
    const double c = eq(d);
    // widen geometrically on both sides until c changes sign
    for (int k = 1; k <= 14; ++k) {
        const double f = std::pow(1.05, k);
        for (double dn : {d / f, d * f}) {
            const double cn = eq(dn);
            if ((cn > 0.0) != (c > 0.0))
                return dn < d ? settle_on_own_mesh(eq, dn, d, cn, c, gs, v0, opt)
                              : settle_on_own_mesh(eq, d, dn, c, cn, gs, v0, opt);
        }
    }
    throw BracketFailure(fmt::format("eps = {}: reduced equation keeps one sign within a factor 2 of d = {}", eps, d));
}

BranchPoint seed_branch(const GroundState& gs, const RadialProfile& v0, const ReducedEnergyConstants& c, double eps0,
                        const BranchOptions& opt) {
    if (eps0 == 0.0) throw DomainError("seed_branch: eps0 must be nonzero");
    const int want = c.sign_condition > 0 ? 1 : -1;
    if (!opt.allow_any_sign && (eps0 > 0 ? 1 : -1) != want)
        throw DomainError(fmt::format("seed_branch: eps0 = {} has the wrong sign for this theorem case", eps0));
    std::vector<double> ds{0.5 * c.d0, c.d0, 2.0 * c.d0};
    ds.insert(ds.end(), opt.extra_d.begin(), opt.extra_d.end());
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    std::string log;
    for (double g : opt.eps_growth) {
        const double eps = eps0 * g;
        try {
            ReducedEquation eq(gs, v0, eps, c.d0, opt);
            std::vector<double> cs;
            std::string line = fmt::format("\n  eps = {:.4g}: c(d) =", eps);
            for (double d : ds) {
                (void)BubbleParams::scaled(eps, d, Point6{}, Point6{}, std::min(opt.sigma, 0.5 * d));
                cs.push_back(eq(d));
                line += fmt::format(" [{:.4g}: {:.4g}]", d, cs.back());
            }
            for (std::size_t i = 0; i + 1 < ds.size(); ++i)
                if ((cs[i] > 0.0) != (cs[i + 1] > 0.0))
                    return settle_on_own_mesh(eq, ds[i], ds[i + 1], cs[i], cs[i + 1], gs, v0, opt);
            log += line + " keeps one sign";
        } catch (const Error& e) {
            log += fmt::format("\n  eps = {:.4g}: {}", eps, e.what());
        }
    }
    throw SeedFailure("no accepted seed" + log);
}

std::vector<BranchPoint> continue_branch(const BranchPoint& start, const GroundState& gs, const RadialProfile& v0,
                                         const std::vector<double>& eps_targets, const BranchOptions& opt) {
    std::vector<BranchPoint> out{start};
    const int sg = start.eps > 0 ? 1 : -1;
    double prev_target = start.eps;
    for (double t : eps_targets) {
        if (t == 0.0 || (t > 0 ? 1 : -1) != sg)
            throw DomainError(fmt::format("continue_branch: target {} has the wrong sign", t));
        if (std::abs(t) > std::abs(prev_target) * (1.0 + 1e-12))
            throw DomainError("continue_branch: targets must move toward 0");
        prev_target = t;
    }

    // secant on d = delta / |eps| against |eps|
    auto predict = [&](double eps) {
        const BranchPoint& last = out.back();
        double d = last.delta_extracted / std::abs(last.eps);
        if (out.size() >= 2) {
            const BranchPoint& prev = out[out.size() - 2];
            const double d_prev = prev.delta_extracted / std::abs(prev.eps);
            const double slope = (d - d_prev) / (std::abs(last.eps) - std::abs(prev.eps));
            d += slope * (std::abs(eps) - std::abs(last.eps));
        }
        return d;
    };

    for (double target : eps_targets) {
        if (target == out.back().eps) continue;
        int halvings = 0;
        double goal = target;
        while (true) {
            try {
                out.push_back(solve_branch_point_at(gs, v0, goal, predict(goal), opt));
                if (goal == target) break;
                goal = target;  // retry the full step from the new point
            } catch (const Error& e) {
                if (++halvings > opt.max_halvings)
                    throw BranchStall(fmt::format("stalled between eps = {} and {}: {}", out.back().eps, target, e.what()),
                                      out);
                // halve the step in log |eps|
                goal = sg * std::sqrt(std::abs(out.back().eps) * std::abs(goal));
            }
        }
    }
    return out;
}

RateFit fit_blowup_rate(const std::vector<BranchPoint>& branch, double d0_predicted) {
    if (branch.size() < 4) throw FitError(fmt::format("need >= 4 branch points, have {}", branch.size()));
    double emin = std::abs(branch.front().eps), emax = emin;
    for (const auto& p : branch) {
        emin = std::min(emin, std::abs(p.eps));
        emax = std::max(emax, std::abs(p.eps));
    }
    if (emax < 10.0 * emin * (1.0 - 1e-9)) throw FitError("branch spans less than one decade of |eps|");
    const double n = static_cast<double>(branch.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double lx = 0, ly = 0, lxx = 0, lxy = 0;
    for (const auto& p : branch) {
        const double x = std::abs(p.eps);
        const double y = p.delta_extracted;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        const double a = std::log(x);
        const double b = std::log(std::max(p.phi_norm_proxy, 1e-300));
        lx += a;
        ly += b;
        lxx += a * a;
        lxy += a * b;
    }
    RateFit f;
    f.points = static_cast<int>(branch.size());
    const double den = n * sxx - sx * sx;
    f.d_fitted = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.d_fitted * sx) / n;
    const double ybar = sy / n;
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& p : branch) {
        const double e = p.delta_extracted - (f.d_fitted * std::abs(p.eps) + f.intercept);
        ss_res += e * e;
        ss_tot += (p.delta_extracted - ybar) * (p.delta_extracted - ybar);
    }
    f.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    f.eps_min = emin;
    f.eps_max = emax;
    f.d0_predicted = d0_predicted;
    f.relative_gap = std::abs(f.d_fitted - d0_predicted) / d0_predicted;
    f.remainder_slope = (n * lxy - lx * ly) / (n * lxx - lx * lx);
    return f;
}

RateFit fit_blowup_rate(const std::vector<BranchPoint>& branch, const ReducedEnergyConstants& c) {
    return fit_blowup_rate(branch, c.d0);
}

}  // namespace bn6
