#include "bn6/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>
#include <fmt/format.h>

#include "bn6/branch.hpp"
#include "bn6/bubble.hpp"
#include "bn6/errors.hpp"
#include "bn6/expansion.hpp"
#include "bn6/parallel.hpp"
#include "bn6/quadrature.hpp"
#include "bn6/svg.hpp"
#include "json_io.hpp"

namespace bn6 {

namespace fs = std::filesystem;
using detail::Json;
using detail::real;

namespace {

constexpr double kConstantsLimit = 1e-8;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double x) { return fmt::format("{:.17g}", x); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class... Args>
void say(const RunOptions& opt, fmt::format_string<Args...> f, Args&&... args) {
    if (opt.quiet) return;
    fmt::print("{}\n", fmt::format(f, std::forward<Args>(args)...));
    std::fflush(stdout);
}

// Shared per-command state: output directory, digest, manifest.
struct Stage {
    const RunConfig& cfg;
    const RunOptions& opt;
    std::string name;
    fs::path dir;
    std::string digest;
    RunManifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    Stage(const RunConfig& c, const RunOptions& o, std::string n)
        : cfg(c), opt(o), name(std::move(n)), dir(c.output_dir), digest(config_digest(c)) {
        fs::create_directories(dir);
        auto m = RunManifest::load(dir);
        // a directory holding another config's run starts a new manifest
        manifest = (m && m->config_digest == digest) ? std::move(*m) : RunManifest::for_config(c);
    }

    Json header() const {
        Json j;
        j["stage"] = name;
        j["config_digest"] = digest;
        return j;
    }

    void write(const std::string& file, const std::string& text) const { detail::write_text_file(dir / file, text); }
    void write_json(const std::string& file, const Json& j) const { write(file, detail::dump_json(j)); }

    /// Reads a prerequisite record, insisting it was produced under this config.
    Json require(const std::string& file, const std::string& stage) const {
        const fs::path p = dir / file;
        if (!fs::exists(p))
            throw MissingDependency(stage, fmt::format("{} not found in {}; run `bn6 {}` first", file, dir.string(), stage));
        Json j = detail::read_json_file(p);
        const std::string got = j.value("config_digest", "");
        if (got != digest)
            throw MissingDependency(stage, fmt::format("{} belongs to config digest {}, current is {}; rerun `bn6 {}`",
                                                       file, got.substr(0, 12), digest.substr(0, 12), stage));
        return j;
    }

    /// True when `file` holds this config's output and the cache may be used.
    bool cached(const std::string& file) const {
        if (opt.fresh || !fs::exists(dir / file)) return false;
        try {
            return detail::read_json_file(dir / file).value("config_digest", "") == digest;
        } catch (const Error&) {
            return false;
        }
    }

    void finish(const std::vector<std::string>& files, bool was_cached) {
        manifest.record_stage(name, dir, files, seconds_since(t0), was_cached);
        manifest.save(dir);
    }
};

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

std::string profile_text(const RadialProfile& p) {
    std::ostringstream os;
    write_profile(os, p);
    return os.str();
}

RadialProfile read_profile_file(const fs::path& p, const std::string& stage) {
    if (!fs::exists(p)) throw MissingDependency(stage, fmt::format("{} not found; run `bn6 {}` first", p.string(), stage));
    std::istringstream is(detail::read_text_file(p));
    return read_profile(is);
}

Json constants_json(const ReducedEnergyConstants& c) {
    Json j;
    j["a1"] = c.a1;
    j["a2"] = c.a2;
    j["a3"] = c.a3;
    j["R0"] = c.R0;
    j["u0_max"] = c.u0_max;
    j["v0_at_center"] = c.v0_at_center;
    j["sign_condition"] = c.sign_condition;
    j["d0"] = c.d0;
    j["hessian_scalar"] = c.hessian_scalar;
    j["lambda0"] = c.lambda0;
    j["a3_direct"] = c.a3_direct;
    j["d0_direct"] = c.d0_direct;
    j["eps_sign_direct"] = c.eps_sign_direct;
    return j;
}

ReducedEnergyConstants constants_from_json(const Json& j) {
    ReducedEnergyConstants c;
    c.a1 = j.at("a1").get<double>();
    c.a2 = j.at("a2").get<double>();
    c.a3 = j.at("a3").get<double>();
    c.R0 = j.at("R0").get<double>();
    c.u0_max = j.at("u0_max").get<double>();
    c.v0_at_center = j.at("v0_at_center").get<double>();
    c.sign_condition = j.at("sign_condition").get<double>();
    c.d0 = j.at("d0").get<double>();
    c.hessian_scalar = j.at("hessian_scalar").get<double>();
    c.lambda0 = j.at("lambda0").get<double>();
    c.a3_direct = j.at("a3_direct").get<double>();
    c.d0_direct = j.at("d0_direct").get<double>();
    c.eps_sign_direct = j.at("eps_sign_direct").get<int>();
    return c;
}

SolverSettings solver_settings(const RunConfig& cfg) {
    SolverSettings s;
    s.grid_n = cfg.grid_n;
    s.tol_bc = cfg.tol_bc;
    s.tol_eig = cfg.tol_eig;
    s.newton_tol = cfg.newton_tol;
    s.degree = cfg.degree;
    return s;
}

ExpansionOptions expansion_options(const RunConfig& cfg, unsigned jobs) {
    ExpansionOptions o;
    o.sigma = cfg.sigma;
    o.quad_tol = cfg.quad_tol;
    o.grid_n = cfg.grid_n;
    o.jobs = jobs;
    return o;
}

}  // namespace

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"constants", "lambda0", "ground-state", "expansion", "branch", "report"};
    return names;
}

RadialProfile with_solution_curvature(const RadialProfile& u, double lambda) {
    const auto r = u.nodes();
    const auto v = u.values();
    const auto dv = u.derivs();
    std::vector<double> c(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double f = std::abs(v[i]) * v[i] + lambda * v[i];
        c[i] = r[i] == 0.0 ? -f / 6.0 : -5.0 * dv[i] / r[i] - f;
    }
    return RadialProfile({r.begin(), r.end()}, {v.begin(), v.end()}, {dv.begin(), dv.end()}, std::move(c));
}

RadialProfile with_linearized_curvature(const RadialProfile& v, const RadialProfile& u0, double lambda0) {
    const auto r = v.nodes();
    const auto w = v.values();
    const auto dw = v.derivs();
    std::vector<double> c(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double u = u0.value(r[i]);
        const double f = (2.0 * std::abs(u) + lambda0) * w[i] + u;
        c[i] = r[i] == 0.0 ? -f / 6.0 : -5.0 * dw[i] / r[i] - f;
    }
    return RadialProfile({r.begin(), r.end()}, {w.begin(), w.end()}, {dw.begin(), dw.end()}, std::move(c));
}

StoredCriticalData load_critical_data(const fs::path& dir, const std::string& digest) {
    const fs::path p = dir / "ground_state.json";
    if (!fs::exists(p))
        throw MissingDependency("ground-state", fmt::format("ground_state.json not found in {}; run `bn6 ground-state` first",
                                                            dir.string()));
    const Json j = detail::read_json_file(p);
    if (j.value("config_digest", "") != digest)
        throw MissingDependency("ground-state", "ground_state.json belongs to another config; rerun `bn6 ground-state`");
    StoredCriticalData out;
    const double lambda0 = j.at("lambda0").get<double>();
    out.gs.lambda = lambda0;
    out.gs.max_value = j.at("u0_max").get<double>();
    out.gs.shooting_residual = j.at("shooting_residual").get<double>();
    out.gs.morse_index = j.at("morse_index").get<int>();
    out.gs.profile = with_solution_curvature(read_profile_file(dir / "u0.profile", "ground-state"), lambda0);
    out.v0 = with_linearized_curvature(read_profile_file(dir / "v0.profile", "ground-state"), out.gs.profile, lambda0);
    out.constants = constants_from_json(j.at("constants"));
    out.theorem_case = j.at("theorem_case").get<std::string>() == "positive_eps" ? TheoremCase::positive_eps
                                                                                 : TheoremCase::negative_eps;
    return out;
}

// ---------------------------------------------------------------- constants

int cmd_constants(const RunConfig& cfg, const RunOptions& opt) {
    Stage st(cfg, opt, "constants");
    const double a = alpha6();
    const double w = omega6();
    const double pi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
    const BubbleIntegrals bi = bubble_integrals();
    const double inf = std::numeric_limits<double>::infinity();
    auto quad = [&](const std::function<double(double)>& f) { return adaptive_estimate(f, 0.0, inf, cfg.quad_tol).value; };
    const double intU3_quad = w * quad([a](double r) { return a * a * a * std::pow(1.0 + r * r, -6) * std::pow(r, 5); });
    const double intW4_quad = w * quad([](double r) { return std::pow(1.0 + r * r, -4) * std::pow(r, 5); });
    const double a1w_closed = a * a * bi.intW4 / w;
    const double a1w_quad = a * a * intW4_quad / w;
    const double a2w_closed = 0.5 * a1w_closed;
    const double a2w_quad = 0.5 * a1w_quad;
    auto rel = [](double x, double ref) { return std::abs(x - ref) / std::abs(ref); };

    struct Check {
        std::string name;
        double delta;
    };
    const std::vector<Check> checks{
        {"alpha6_vs_24", rel(a, 24.0)},
        {"omega6_vs_pi_cubed", rel(w, pi3)},
        {"omega6_vs_sphere_area", rel(sphere_area(6), w)},
        {"intU3_closed_vs_quadrature", rel(intU3_quad, bi.intU3)},
        {"intW4_closed_vs_quadrature", rel(intW4_quad, bi.intW4)},
        {"a1_over_omega6_vs_96", rel(a1w_closed, 96.0)},
        {"a1_over_omega6_quadrature_vs_96", rel(a1w_quad, 96.0)},
        {"a2_over_omega6_vs_48", rel(a2w_closed, 48.0)},
        {"a2_over_omega6_quadrature_vs_48", rel(a2w_quad, 48.0)},
    };

    // PU - U + alpha delta^2 H(., 0) for the central bubble, sup over radii.
    // On the ball PU - U is the constant -shift; forming it as (U - shift) - U
    // would bury the delta^4 signal under rounding of U(0) = alpha / delta^2.
    const DomainBall dom(cfg.domain_radius);
    const double R = cfg.domain_radius;
    const std::vector<double> deltas = geometric_breaks(1e-3 * R, 1e-1 * R, 6.0);
    std::vector<double> sups;
    std::string proj_csv = "delta,sup_error,sup_error_over_delta4\n";
    for (double d : deltas) {
        const CentralBubble pu(d, R);
        double s = 0.0;
        for (int k = 0; k <= 64; ++k) {
            Point6 x{};
            x[0] = R * k / 64.0;
            s = std::max(s, std::abs(-pu.shift() + a * d * d * regular_part_ball(x, Point6{}, dom)));
        }
        sups.push_back(s);
        proj_csv += fmt::format("{},{},{}\n", num(d), num(s), num(s / std::pow(d, 4)));
    }
    const double proj_slope = loglog_slope(deltas, sups);

    Json j = st.header();
    j["alpha6"] = a;
    j["omega6"] = w;
    j["omega6_closed"] = pi3;
    j["intU3_closed"] = bi.intU3;
    j["intU3_quadrature"] = intU3_quad;
    j["intW4_closed"] = bi.intW4;
    j["intW4_quadrature"] = intW4_quad;
    j["a1_over_omega6"] = a1w_closed;
    j["a1_over_omega6_quadrature"] = a1w_quad;
    j["a2_over_omega6"] = a2w_closed;
    j["a2_over_omega6_quadrature"] = a2w_quad;
    j["quad_tol"] = cfg.quad_tol;
    Json cj = Json::array();
    std::vector<std::string> failed;
    for (const auto& c : checks) {
        const bool ok = c.delta <= kConstantsLimit;
        if (!ok) failed.push_back(c.name);
        Json e;
        e["name"] = c.name;
        e["relative_delta"] = real(c.delta);
        e["limit"] = kConstantsLimit;
        e["pass"] = ok;
        cj.push_back(std::move(e));
    }
    j["checks"] = std::move(cj);
    Json pj;
    pj["delta_min"] = deltas.front();
    pj["delta_max"] = deltas.back();
    pj["points"] = deltas.size();
    pj["loglog_slope"] = proj_slope;
    j["projection"] = std::move(pj);
    st.write_json("constants.json", j);
    st.write("projection.csv", proj_csv);
    st.finish({"constants.json", "projection.csv"}, false);

    say(opt, "alpha6            {:.17g}", a);
    say(opt, "omega6            {:.17g}", w);
    say(opt, "int U^3           {:.17g} (quadrature {:.17g})", bi.intU3, intU3_quad);
    say(opt, "a1/omega6         {:.17g} (quadrature {:.17g})", a1w_closed, a1w_quad);
    say(opt, "a2/omega6         {:.17g} (quadrature {:.17g})", a2w_closed, a2w_quad);
    say(opt, "projection slope  {:.6f} over delta in [{:.0e}, {:.0e}]", proj_slope, deltas.front(), deltas.back());
    if (!failed.empty()) {
        for (const auto& n : failed) fmt::print(stderr, "bn6 constants: check failed: {}\n", n);
        return static_cast<int>(ExitCode::criterion_failure);
    }
    return 0;
}

// ---------------------------------------------------------------- lambda0

int cmd_lambda0(const RunConfig& cfg, const RunOptions& opt) {
    Stage st(cfg, opt, "lambda0");
    const std::vector<std::string> files{"lambda0.json"};
    if (st.cached("lambda0.json")) {
        const Json j = st.require("lambda0.json", "lambda0");
        say(opt, "lambda0 {:.17g} (cached)", j.at("lambda0").get<double>());
        st.finish(files, true);
        return 0;
    }
    const DomainBall dom(cfg.domain_radius);
    const Lambda0Result l0 = locate_lambda0(dom, cfg.lambda0_tol);
    const double j21 = boost::math::cyl_bessel_j_zero(2.0, 1);
    const double oracle = (j21 / cfg.domain_radius) * (j21 / cfg.domain_radius);
    const LinearizedSpectrum free = sector_eigenvalues([](double) { return 0.0; }, cfg.domain_radius, 0, 1);
    const double mu1 = free.eigenvalues.at(0);

    Json j = st.header();
    j["lambda0"] = l0.lambda0;
    j["fixed_point_residual"] = l0.residual;
    j["lambda1"] = l0.lambda1;
    j["lambda1_bessel_oracle"] = oracle;
    j["lambda1_sector_solver"] = mu1;
    j["lambda1_solver_gap"] = std::abs(mu1 - oracle);
    j["f_low"] = l0.f_low;
    j["f_high"] = l0.f_high;
    Json br = Json::array();
    for (const auto& [lo, hi] : l0.brackets) br.push_back(Json::array({lo, hi}));
    j["brackets"] = std::move(br);
    st.write_json("lambda0.json", j);
    st.finish(files, false);

    say(opt, "lambda0           {:.17g}", l0.lambda0);
    say(opt, "|f(lambda0)|      {:.3e}", l0.residual);
    say(opt, "lambda1           {:.17g} (solver {:.17g})", oracle, mu1);
    say(opt, "sign change       f = {:.6g} .. {:.6g}, {} bracket(s)", l0.f_low, l0.f_high, l0.brackets.size());
    return 0;
}

// ---------------------------------------------------------------- ground state

int cmd_ground_state(const RunConfig& cfg, const RunOptions& opt) {
    Stage st(cfg, opt, "ground-state");
    const std::vector<std::string> files{"ground_state.json", "u0.profile", "v0.profile", "spectra.csv", "assumptions.txt"};
    const Json lj = st.require("lambda0.json", "lambda0");
    if (st.cached("ground_state.json") &&
        std::all_of(files.begin(), files.end(), [&](const std::string& f) { return fs::exists(st.dir / f); })) {
        say(opt, "ground state (cached)");
        st.finish(files, true);
        return 0;
    }

    Lambda0Result l0;
    l0.lambda0 = lj.at("lambda0").get<double>();
    l0.residual = lj.at("fixed_point_residual").get<double>();
    l0.lambda1 = lj.at("lambda1").get<double>();
    l0.f_low = lj.at("f_low").get<double>();
    l0.f_high = lj.at("f_high").get<double>();
    for (const auto& b : lj.at("brackets")) l0.brackets.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());

    CriticalSettings cs;
    cs.solver = solver_settings(cfg);
    cs.ell_max = cfg.ell_max;
    cs.eigen_count = cfg.eigen_count;
    cs.lambda0_tol = cfg.lambda0_tol;
    cs.v00_tol = cfg.v00_tol;
    const DomainBall dom(cfg.domain_radius);
    const CriticalData cd = analyze_at(l0, dom, cs);

    // later stages read the files, so constants come from the same bytes
    const std::string u_text = profile_text(cd.ground_state.profile);
    const std::string v_text = profile_text(cd.v0);
    std::istringstream us(u_text), vs(v_text);
    GroundState gs = cd.ground_state;
    gs.profile = with_solution_curvature(read_profile(us), l0.lambda0);
    const RadialProfile v0 = with_linearized_curvature(read_profile(vs), gs.profile, l0.lambda0);
    const ReducedEnergyConstants c = compute_constants(gs, v0, cfg.v00_tol);
    const AssumptionReport& rep = cd.report;
    const TheoremCase tc = c.sign_condition > 0 ? TheoremCase::positive_eps : TheoremCase::negative_eps;

    Json j = st.header();
    j["lambda0"] = l0.lambda0;
    j["u0_max"] = gs.max_value;
    j["fixed_point_residual"] = std::abs(l0.lambda0 - 2.0 * gs.max_value);
    j["shooting_residual"] = gs.shooting_residual;
    j["pohozaev_defect"] = pohozaev_defect(gs.profile, gs.lambda);
    j["strong_defect"] = strong_defect(gs.profile, gs.lambda);
    j["morse_index"] = gs.morse_index;
    j["theorem_case"] = to_string(tc);
    j["eps_sign"] = eps_sign(tc);
    j["nondegenerate"] = rep.nondegenerate;
    j["tol_eig"] = cfg.tol_eig;
    Json mins = Json::array();
    for (double m : rep.sector_min_abs_mu) mins.push_back(m);
    j["sector_min_abs_mu"] = std::move(mins);
    j["nondegeneracy_margin"] = *std::min_element(rep.sector_min_abs_mu.begin(), rep.sector_min_abs_mu.end());
    j["v00_margin"] = std::abs(c.sign_condition);
    j["hessian_negative"] = c.hessian_scalar < 0.0;
    j["constants"] = constants_json(c);
    j["grid_n"] = cfg.grid_n;

    std::string spectra = "ell,k,mu\n";
    for (const auto& s : cd.spectra)
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
            spectra += fmt::format("{},{},{}\n", s.sector, k, num(s.eigenvalues[k]));

    std::string txt;
    auto kv = [&txt](const std::string& k, const std::string& v) { txt += fmt::format("{} = {}\n", k, v); };
    kv("lambda0", num(l0.lambda0));
    kv("fixed_point_residual", num(std::abs(l0.lambda0 - 2.0 * gs.max_value)));
    kv("nondegenerate", rep.nondegenerate ? "true" : "false");
    for (std::size_t l = 0; l < rep.sector_min_abs_mu.size(); ++l)
        kv(fmt::format("sector_{}_min_abs_mu", l), num(rep.sector_min_abs_mu[l]));
    kv("v0_at_center", num(c.v0_at_center));
    kv("one_minus_2v0", num(c.sign_condition));
    kv("theorem_case", to_string(tc));
    kv("hessian_negative", c.hessian_scalar < 0.0 ? "true" : "false");
    for (std::size_t b = 0; b < l0.brackets.size(); ++b)
        kv(fmt::format("bracket_{}", b), fmt::format("{}, {}", num(l0.brackets[b].first), num(l0.brackets[b].second)));

    st.write("u0.profile", u_text);
    st.write("v0.profile", v_text);
    st.write("spectra.csv", spectra);
    st.write("assumptions.txt", txt);
    st.write_json("ground_state.json", j);
    st.finish(files, false);

    say(opt, "u0(0)             {:.17g}", gs.max_value);
    say(opt, "v0(0)             {:.17g}", c.v0_at_center);
    say(opt, "1 - 2 v0(0)       {:.6g} -> {}", c.sign_condition, to_string(tc));
    say(opt, "min |mu| (l<={})  {:.6g}", cfg.ell_max, j["nondegeneracy_margin"].get<double>());
    say(opt, "d0 = {:.6g}, a1 = {:.6g}, a3 = {:.6g}, R0 = {:.6g}", c.d0, c.a1, c.a3, c.R0);
    return 0;
}

// ---------------------------------------------------------------- expansion

int cmd_expansion(const RunConfig& cfg, const RunOptions& opt) {
    Stage st(cfg, opt, "expansion");
    const StoredCriticalData sd = load_critical_data(st.dir, st.digest);
    const ReducedEnergyConstants& c = sd.constants;
    const int sg = eps_sign(sd.theorem_case);
    std::vector<double> eps_list;
    for (double e : cfg.eps_sweep) eps_list.push_back(sg * std::abs(e));
    std::sort(eps_list.begin(), eps_list.end());
    std::vector<double> d_grid;
    for (double m : cfg.d_multiples()) d_grid.push_back(m * c.d0);
    const ExpansionOptions eo = expansion_options(cfg, opt.jobs);

    const std::vector<ExpansionSample> samples = expansion_check(sd.gs, sd.v0, c, eps_list, d_grid, eo);

    ExpansionOptions inner = eo;
    inner.jobs = 1;
    std::vector<ITerms> iterms(eps_list.size());
    std::vector<double> crossover(eps_list.size());
    parallel_for(eps_list.size(), opt.jobs, [&](std::size_t i) {
        iterms[i] = i_term_audit(sd.gs, sd.v0, c, eps_list[i], c.d0, inner);
        crossover[i] = crossover_radius(assemble_ansatz(sd.gs, sd.v0, eps_list[i], c.d0, inner));
    });

    std::string csv = "eps,d,J,c0,upsilon_measured,upsilon_predicted,residual_l32,residual_ratio\n";
    for (const auto& s : samples)
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(s.eps), num(s.d), num(s.j_value), num(s.c0),
                           num(s.upsilon_measured), num(s.upsilon_predicted), num(s.residual_l32),
                           num(s.residual_ratio));
    std::string icsv = "eps,d,i2_excess,i3,i4,i5,i6,i7,sum,i4_display,i5_display,i5_direct\n";
    for (const auto& t : iterms)
        icsv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", num(t.eps), num(t.d), num(t.i2_excess), num(t.i3),
                            num(t.i4), num(t.i5), num(t.i6), num(t.i7), num(t.sum()), num(t.i4_display),
                            num(t.i5_display), num(t.i5_direct));
    std::string lcsv = "eps,d,delta,crossover_radius,ratio,R0,relative_gap\n";
    Json levels = Json::array();
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double delta = std::abs(eps_list[i]) * c.d0;
        const double ratio = crossover[i] / std::sqrt(delta);
        const double gap = std::abs(ratio - c.R0) / c.R0;
        lcsv += fmt::format("{},{},{},{},{},{},{}\n", num(eps_list[i]), num(c.d0), num(delta), num(crossover[i]),
                            num(ratio), num(c.R0), num(gap));
        Json e;
        e["eps"] = eps_list[i];
        e["ratio"] = ratio;
        e["relative_gap"] = gap;
        levels.push_back(std::move(e));
    }

    // per-eps summaries the report reads
    const double lo = 0.5 * c.d0 * (1.0 - 1e-12), hi = 2.0 * c.d0 * (1.0 + 1e-12);
    Json per_eps = Json::array();
    for (double e : eps_list) {
        Json pe;
        pe["eps"] = e;
        const ExpansionSample* at_d0 = nullptr;
        const ExpansionSample* best = nullptr;
        // Upsilon vanishes inside [d0/2, 2 d0], so the window error is taken
        // relative to the largest |Upsilon| there rather than pointwise
        double worst = 0.0, scale = 0.0;
        for (const auto& s : samples) {
            if (s.eps != e) continue;
            if (std::abs(s.d - c.d0) <= 1e-12 * c.d0) at_d0 = &s;
            if (!best || s.upsilon_measured > best->upsilon_measured) best = &s;
            if (s.d >= lo && s.d <= hi) {
                worst = std::max(worst, std::abs(s.upsilon_measured - s.upsilon_predicted));
                scale = std::max(scale, std::abs(s.upsilon_predicted));
            }
        }
        worst = scale > 0.0 ? worst / scale : std::numeric_limits<double>::infinity();
        if (at_d0) {
            pe["upsilon_measured_at_d0"] = at_d0->upsilon_measured;
            pe["upsilon_predicted_at_d0"] = at_d0->upsilon_predicted;
            pe["upsilon_direct_at_d0"] = at_d0->upsilon_direct;
            pe["relative_error_at_d0"] =
                std::abs(at_d0->upsilon_measured - at_d0->upsilon_predicted) / std::abs(at_d0->upsilon_predicted);
            pe["relative_error_vs_direct_at_d0"] =
                std::abs(at_d0->upsilon_measured - at_d0->upsilon_direct) / std::abs(at_d0->upsilon_direct);
            pe["residual_ratio_at_d0"] = at_d0->residual_ratio;
        } else {
            pe["upsilon_measured_at_d0"] = nullptr;
        }
        pe["window_error_half_to_double_d0"] = real(worst);
        pe["argmax_d_measured"] = best ? real(best->d) : Json(nullptr);
        per_eps.push_back(std::move(pe));
    }
    double grid_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < d_grid.size(); ++i) grid_step = std::min(grid_step, d_grid[i] - d_grid[i - 1]);

    Json it = Json::array();
    std::vector<double> ae, i6, i7;
    for (const auto& t : iterms) {
        Json e;
        const double e3 = std::pow(std::abs(t.eps), 3);
        e["eps"] = t.eps;
        e["i4_over_display"] = t.i4 / t.i4_display;
        e["i5_over_display"] = t.i5 / t.i5_display;
        e["i5_over_direct"] = t.i5 / t.i5_direct;
        e["i5_scaled"] = t.i5 / (e3 * t.d * t.d * t.d);
        e["i4_scaled"] = t.i4 / (t.eps * t.eps * t.eps * t.d * t.d);
        it.push_back(std::move(e));
        ae.push_back(std::abs(t.eps));
        i6.push_back(t.i6);
        i7.push_back(t.i7);
    }

    Json j = st.header();
    j["eps_sign"] = sg;
    j["d0"] = c.d0;
    j["d0_direct"] = c.d0_direct;
    j["d_grid_step"] = grid_step;
    j["i5_display_constant"] = -(11.0 / 9.0) * omega6() * std::pow(alpha6(), 1.5) * std::pow(c.u0_max, 1.5);
    j["per_eps"] = std::move(per_eps);
    j["iterms"] = std::move(it);
    j["i6_order"] = ae.size() >= 2 ? real(loglog_slope(ae, i6)) : Json(nullptr);
    j["i7_order"] = ae.size() >= 2 ? real(loglog_slope(ae, i7)) : Json(nullptr);
    j["levelset"] = std::move(levels);
    j["R0"] = c.R0;

    PlotSpec plot;
    plot.title = sg > 0 ? "Reduced energy, eps > 0" : "Reduced energy, eps < 0";
    plot.xlabel = "d";
    plot.ylabel = "(J(W) - c0) / |eps|^3";
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        PlotSeries s;
        s.label = fmt::format("measured, eps = {:.3g}", eps_list[i]);
        s.color = kPalette[i % std::size(kPalette)];
        for (const auto& x : samples)
            if (x.eps == eps_list[i]) s.points.emplace_back(x.d, x.upsilon_measured);
        plot.series.push_back(std::move(s));
    }
    PlotSeries pred{"Upsilon(d, 0)", {}, true, "#000000", true};
    PlotSeries direct{"direct law", {}, true, "#7f7f7f", true};
    for (int k = 0; k <= 120; ++k) {
        const double d = d_grid.front() + (d_grid.back() - d_grid.front()) * k / 120.0;
        pred.points.emplace_back(d, upsilon(d, Point6{}, sg, c));
        direct.points.emplace_back(d, upsilon_direct(d, sg, c));
    }
    plot.series.push_back(std::move(pred));
    plot.series.push_back(std::move(direct));

    st.write("expansion.csv", csv);
    st.write("iterms.csv", icsv);
    st.write("levelset.csv", lcsv);
    st.write_json("expansion.json", j);
    st.write("expansion.svg", render_svg(plot));
    st.finish({"expansion.csv", "iterms.csv", "levelset.csv", "expansion.json", "expansion.svg"}, false);

    for (const auto& pe : j["per_eps"]) {
        if (pe["upsilon_measured_at_d0"].is_null()) continue;
        say(opt, "eps {:+.4e}: Upsilon(d0) measured {:.6g}, predicted {:.6g}; defect ratio {:.4g}",
            pe["eps"].get<double>(), pe["upsilon_measured_at_d0"].get<double>(),
            pe["upsilon_predicted_at_d0"].get<double>(), pe["residual_ratio_at_d0"].get<double>());
    }
    return 0;
}

// ---------------------------------------------------------------- branch

namespace {

struct BranchRun {
    int sign = 1;
    std::string status = "ok";
    std::string message;
    std::vector<BranchPoint> points;
    std::optional<RateFit> fit;
    std::string fit_error;
    std::optional<int> reseed_steps;
    double reseed_d_before = 0.0, reseed_d_after = 0.0;
    std::string reseed_error;
};

BranchRun run_branch(const StoredCriticalData& sd, const RunConfig& cfg, int sign, bool any_sign) {
    const ReducedEnergyConstants& c = sd.constants;
    BranchOptions bo;
    bo.solver = solver_settings(cfg);
    bo.sigma = cfg.sigma;
    bo.allow_any_sign = any_sign;
    for (double m : cfg.branch_seed_d) bo.extra_d.push_back(m * c.d0);
    BranchRun out;
    out.sign = sign;
    BranchPoint seed;
    try {
        seed = seed_branch(sd.gs, sd.v0, c, sign * cfg.branch_eps0, bo);
    } catch (const SeedFailure& e) {
        out.status = "seed_failure";
        out.message = e.what();
        out.fit_error = "no branch to fit";
        return out;
    }
    // Newton restarted on the accepted profile should have nothing left to do
    try {
        const BranchPoint again = solve_branch_point(sd.gs, sd.v0, seed.eps, seed.profile, bo);
        out.reseed_steps = again.newton_steps;
        out.reseed_d_before = seed.delta_extracted / std::abs(seed.eps);
        out.reseed_d_after = again.delta_extracted / std::abs(seed.eps);
    } catch (const Error& e) {
        out.reseed_error = e.what();
    }
    std::vector<double> targets;
    for (double t : cfg.branch_targets()) targets.push_back(sign * t);
    try {
        out.points = continue_branch(seed, sd.gs, sd.v0, targets, bo);
    } catch (const BranchStall& e) {
        out.status = "stall";
        out.message = e.what();
        out.points = e.partial();
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const BranchPoint& a, const BranchPoint& b) { return std::abs(a.eps) > std::abs(b.eps); });
    try {
        out.fit = fit_blowup_rate(out.points, c.d0);
    } catch (const FitError& e) {
        out.fit_error = e.what();
    }
    return out;
}

std::string branch_csv(const BranchRun& b) {
    std::string s = "eps,lambda,u_min,delta,delta_over_abs_eps,nodes,newton_residual,phi_norm_proxy\n";
    for (const auto& p : b.points)
        s += fmt::format("{},{},{},{},{},{},{},{}\n", num(p.eps), num(p.lambda), num(p.u_min), num(p.delta_extracted),
                         num(p.delta_extracted / std::abs(p.eps)), p.node_count, num(p.newton_residual),
                         num(p.phi_norm_proxy));
    return s;
}

Json fit_json(const RateFit& f) {
    Json j;
    j["d_fitted"] = f.d_fitted;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["eps_min"] = f.eps_min;
    j["eps_max"] = f.eps_max;
    j["d0_predicted"] = f.d0_predicted;
    j["relative_gap"] = f.relative_gap;
    j["remainder_slope"] = f.remainder_slope;
    j["points"] = f.points;
    return j;
}

Json branch_json(const BranchRun& b, const ReducedEnergyConstants& c, double eps0) {
    Json j;
    j["eps0"] = b.sign * eps0;
    j["status"] = b.status;
    j["message"] = b.message;
    j["points"] = b.points.size();
    if (b.fit) {
        j["fit"] = fit_json(*b.fit);
        j["relative_gap_vs_d0_direct"] = std::abs(b.fit->d_fitted - c.d0_direct) / c.d0_direct;
    } else {
        j["fit"] = nullptr;
        j["fit_error"] = b.fit_error;
    }
    if (b.reseed_steps) {
        Json r;
        r["newton_steps"] = *b.reseed_steps;
        r["d_before"] = b.reseed_d_before;
        r["d_after"] = b.reseed_d_after;
        j["reseed"] = std::move(r);
    } else {
        j["reseed"] = b.reseed_error.empty() ? Json(nullptr) : Json(b.reseed_error);
    }
    bool single_node = true;
    double poh = 0.0, sdef = 0.0, phi_over_eps = 0.0;
    for (const auto& p : b.points) {
        single_node = single_node && p.node_count == 1;
        poh = std::max(poh, std::abs(p.pohozaev));
        sdef = std::max(sdef, p.strong_defect);
        phi_over_eps = std::max(phi_over_eps, p.phi_norm_proxy / std::abs(p.eps));
    }
    j["all_single_node"] = single_node;
    j["max_pohozaev_defect"] = poh;
    j["max_strong_defect"] = sdef;
    j["max_phi_over_abs_eps"] = phi_over_eps;
    return j;
}

}  // namespace

int cmd_branch(const RunConfig& cfg, const RunOptions& opt) {
    Stage st(cfg, opt, "branch");
    const StoredCriticalData sd = load_critical_data(st.dir, st.digest);
    const ReducedEnergyConstants& c = sd.constants;
    const int sg = eps_sign(sd.theorem_case);

    std::vector<BranchRun> runs(cfg.branch_dichotomy ? 2 : 1);
    parallel_for(runs.size(), std::min(opt.jobs, 2u), [&](std::size_t i) {
        runs[i] = i == 0 ? run_branch(sd, cfg, sg, false) : run_branch(sd, cfg, -sg, true);
    });

    Json j = st.header();
    j["theorem_case"] = to_string(sd.theorem_case);
    j["eps_sign"] = sg;
    j["d0"] = c.d0;
    j["d0_direct"] = c.d0_direct;
    j["theorem"] = branch_json(runs[0], c, cfg.branch_eps0);
    if (runs.size() > 1) j["dichotomy"] = branch_json(runs[1], c, cfg.branch_eps0);

    std::string audit = "branch,eps,newton_steps,pohozaev,strong_defect\n";
    for (std::size_t i = 0; i < runs.size(); ++i)
        for (const auto& p : runs[i].points)
            audit += fmt::format("{},{},{},{},{}\n", i == 0 ? "theorem" : "dichotomy", num(p.eps), p.newton_steps,
                                 num(p.pohozaev), num(p.strong_defect));

    PlotSpec plot;
    plot.title = "Concentration scale along the branch";
    plot.xlabel = "|eps|";
    plot.ylabel = "delta";
    plot.logx = plot.logy = true;
    const char* names[] = {"theorem sign", "opposite sign"};
    for (std::size_t i = 0; i < runs.size(); ++i) {
        PlotSeries s{fmt::format("{} (eps {} 0)", names[i], runs[i].sign > 0 ? ">" : "<"), {}, false, kPalette[i]};
        for (const auto& p : runs[i].points) s.points.emplace_back(std::abs(p.eps), p.delta_extracted);
        plot.series.push_back(std::move(s));
    }
    const double e_hi = cfg.branch_eps0, e_lo = cfg.branch_eps_min;
    plot.series.push_back({"d0 |eps|", {{e_lo, c.d0 * e_lo}, {e_hi, c.d0 * e_hi}}, true, "#000000", true});
    plot.series.push_back({"d0 (direct) |eps|", {{e_lo, c.d0_direct * e_lo}, {e_hi, c.d0_direct * e_hi}}, true, "#7f7f7f", true});

    std::vector<std::string> files{"branch.csv", "branch.json", "branch_audit.csv", "branch.svg"};
    st.write("branch.csv", branch_csv(runs[0]));
    if (runs.size() > 1) {
        st.write("branch_dichotomy.csv", branch_csv(runs[1]));
        files.push_back("branch_dichotomy.csv");
    }
    st.write("branch_audit.csv", audit);
    st.write_json("branch.json", j);
    st.write("branch.svg", render_svg(plot));
    st.finish(files, false);

    for (std::size_t i = 0; i < runs.size(); ++i) {
        const BranchRun& b = runs[i];
        say(opt, "{} branch: {} ({} points)", names[i], b.status, b.points.size());
        if (b.fit)
            say(opt, "  d_fitted {:.6g}, r^2 {:.6f}, gap vs d0 {:.4g}, remainder slope {:.4g}", b.fit->d_fitted,
                b.fit->r_squared, b.fit->relative_gap, b.fit->remainder_slope);
        if (!b.message.empty()) say(opt, "  {}", b.message);
    }
    return 0;
}

// ---------------------------------------------------------------- report

namespace {

struct Judge {
    std::vector<Verdict> verdicts;
    void add(int n, std::string title, bool pass, std::string measured) {
        verdicts.push_back({n, std::move(title), pass, std::move(measured)});
    }
};

double get(const Json& j, const char* key) {
    const Json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

int cmd_report(const RunConfig& cfg, const RunOptions& opt) {
    Stage st(cfg, opt, "report");
    const Json cj = st.require("constants.json", "constants");
    const Json lj = st.require("lambda0.json", "lambda0");
    const Json gj = st.require("ground_state.json", "ground-state");
    const Json ej = st.require("expansion.json", "expansion");
    const Json bj = st.require("branch.json", "branch");
    Judge J;

    {  // 1
        double worst_96 = 0.0, worst_u3 = 0.0;
        for (const auto& c : cj.at("checks")) {
            const std::string n = c.at("name").get<std::string>();
            const double d = c.at("relative_delta").is_number() ? c.at("relative_delta").get<double>() : 1.0;
            if (n.rfind("a1_over_omega6", 0) == 0) worst_96 = std::max(worst_96, d);
            if (n == "intU3_closed_vs_quadrature") worst_u3 = d;
        }
        const double a = get(cj, "alpha6");
        J.add(1, "constants: a1/omega6 = 96, alpha6 = 24, int U^3", worst_96 <= 1e-10 && a == 24.0 && worst_u3 <= 1e-8,
              fmt::format("a1/omega6 rel {:.2e} (<= 1e-10), alpha6 = {:.17g}, int U^3 rel {:.2e} (<= 1e-8)", worst_96, a,
                          worst_u3));
    }
    {  // 2
        const double s = cj.at("projection").at("loglog_slope").get<double>();
        J.add(2, "projection expansion slope", std::abs(s - 4.0) <= 0.3, fmt::format("slope {:.4f} (4 +- 0.3)", s));
    }
    {  // 3
        const double gap = get(lj, "lambda1_solver_gap");
        J.add(3, "first Dirichlet eigenvalue vs Bessel zero", gap <= 1e-6,
              fmt::format("solver {:.10f} vs j_21^2 {:.10f}, gap {:.2e} (<= 1e-6)", get(lj, "lambda1_sector_solver"),
                          get(lj, "lambda1_bessel_oracle"), gap));
    }
    {  // 4
        const double res = get(lj, "fixed_point_residual");
        const bool sign_change = get(lj, "f_low") < 0.0 && get(lj, "f_high") > 0.0 && !lj.at("brackets").empty();
        const double l0 = get(lj, "lambda0");
        const double margin = get(gj, "nondegeneracy_margin");
        const double v00 = get(gj, "v00_margin");
        const bool ok = sign_change && l0 > 0.0 && l0 < get(lj, "lambda1") && res < 1e-8 && margin > cfg.tol_eig &&
                        v00 > 1e-4;
        J.add(4, "lambda0 and assumptions", ok,
              fmt::format("sign change {}, |f(lambda0)| {:.2e} (< 1e-8), min |mu| {:.4g} (> {:.0e}), |1-2v0(0)| {:.4g} "
                          "(> 1e-4)",
                          sign_change ? "certified" : "missing", res, margin, cfg.tol_eig, v00));
    }
    const Json& per = ej.at("per_eps");
    {  // 5
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        int n = 0;
        for (const auto& p : per) {
            if (!p.contains("residual_ratio_at_d0")) continue;
            const double r = p.at("residual_ratio_at_d0").get<double>();
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            ++n;
        }
        J.add(5, "defect scaling eps^2 |ln eps|^(2/3)", n >= 2 && hi < 2.0 * lo,
              fmt::format("ratio in [{:.4g}, {:.4g}] over {} eps values, spread {:.3f} (< 2)", lo, hi, n, hi / lo));
    }
    {  // 6
        const double target = 0.0031622776601683794;
        const Json* at = nullptr;
        for (const auto& p : per)
            if (!at || std::abs(std::abs(p.at("eps").get<double>()) - target) <
                           std::abs(std::abs(at->at("eps").get<double>()) - target))
                at = &p;
        bool ok = false;
        std::string m = "no sample at d0";
        if (at && at->contains("relative_error_at_d0")) {
            const double e0 = at->at("relative_error_at_d0").get<double>();
            const double ew = get(*at, "window_error_half_to_double_d0");
            // argmax tracked at the smallest |eps|
            const Json* smallest = &per.front();
            for (const auto& p : per)
                if (std::abs(p.at("eps").get<double>()) < std::abs(smallest->at("eps").get<double>())) smallest = &p;
            const double step = ej.at("d_grid_step").get<double>();
            const double d0 = ej.at("d0").get<double>();
            const double am = smallest->at("argmax_d_measured").get<double>();
            const bool argmax_ok = std::abs(am - d0) <= step * (1.0 + 1e-9);
            ok = e0 <= 0.05 && ew <= 0.10 && argmax_ok;
            m = fmt::format("eps {:.4g}: measured {:.6g} vs Upsilon {:.6g} at d0, rel {:.3g} (<= 0.05); worst on [d0/2, 2d0] "
                            "{:.3g} of max|Upsilon| (<= 0.10); argmax {:.4g} vs d0 {:.4g}",
                            at->at("eps").get<double>(), at->at("upsilon_measured_at_d0").get<double>(),
                            at->at("upsilon_predicted_at_d0").get<double>(), e0, ew, am, d0);
        }
        J.add(6, "reduced-energy law", ok, m);
    }
    {  // 7
        const double target = 0.0031622776601683794;
        const Json* at = nullptr;
        for (const auto& t : ej.at("iterms"))
            if (!at || std::abs(std::abs(t.at("eps").get<double>()) - target) <
                           std::abs(std::abs(at->at("eps").get<double>()) - target))
                at = &t;
        const double r5 = at->at("i5_over_display").get<double>();
        const double r4 = at->at("i4_over_display").get<double>();
        const double o6 = ej.at("i6_order").is_number() ? ej.at("i6_order").get<double>() : 0.0;
        const double o7 = ej.at("i7_order").is_number() ? ej.at("i7_order").get<double>() : 0.0;
        const bool ok = std::abs(r5 - 1.0) <= 0.10 && std::abs(r4 - 1.0) <= 0.05 && o6 >= 3.9 && o7 >= 3.9;
        J.add(7, "I-term audit", ok,
              fmt::format("I5/display {:.4f} (1 +- 0.10), I4/display {:.4f} (1 +- 0.05), order I6 {:.3f}, I7 {:.3f} (>= 3.9)",
                          r5, r4, o6, o7));
    }
    {  // 8
        const Json& t = bj.at("theorem");
        bool ok = false;
        std::string m;
        if (t.at("fit").is_null()) {
            m = t.at("status").get<std::string>();
            const std::string msg = t.at("message").get<std::string>();
            if (!msg.empty()) m += ": " + msg.substr(0, msg.find('\n'));
            if (t.contains("fit_error")) m += "; " + t.at("fit_error").get<std::string>();
        } else {
            const Json& f = t.at("fit");
            const double r2 = f.at("r_squared").get<double>(), gap = f.at("relative_gap").get<double>();
            const double slope = f.at("remainder_slope").get<double>();
            ok = t.at("status").get<std::string>() == "ok" && t.at("all_single_node").get<bool>() && r2 > 0.99 &&
                 gap <= 0.15 && slope >= 1.8;
            m = fmt::format("d_fitted {:.6g} vs d0 {:.6g}, gap {:.3g} (<= 0.15), r^2 {:.6f} (> 0.99), remainder slope "
                            "{:.3f} (>= 1.8)",
                            f.at("d_fitted").get<double>(), bj.at("d0").get<double>(), gap, r2, slope);
        }
        J.add(8, "blow-up rate along the branch", ok, m);
    }
    {  // 9
        const Json* smallest = nullptr;
        for (const auto& l : ej.at("levelset"))
            if (!smallest || std::abs(l.at("eps").get<double>()) < std::abs(smallest->at("eps").get<double>()))
                smallest = &l;
        const double gap = smallest->at("relative_gap").get<double>();
        J.add(9, "level-set radius over sqrt(delta)", gap <= 0.02,
              fmt::format("eps {:.4g}: ratio {:.6g} vs R0 {:.6g}, gap {:.3g} (<= 0.02)", smallest->at("eps").get<double>(),
                          smallest->at("ratio").get<double>(), ej.at("R0").get<double>(), gap));
    }
    {  // 10
        int same = 0, differ = 0, pending = 0;
        for (const auto& [stage, rec] : st.manifest.stages) {
            if (stage == "report") continue;
            for (const auto& f : rec.files) {
                if (!f.reproduced) ++pending;
                else if (*f.reproduced) ++same;
                else ++differ;
            }
        }
        J.add(10, "determinism", differ == 0 && pending == 0 && same > 0,
              fmt::format("{} files re-run with identical bytes, {} differed, {} not yet re-run (`bn6 all` replays "
                          "every stage)",
                          same, differ, pending));
    }

    std::string txt = fmt::format("bn6 verdicts (config digest {})\n\n", st.digest.substr(0, 16));
    int failures = 0;
    for (const auto& v : J.verdicts) {
        txt += fmt::format("{:>2}  {}  {}\n    {}\n", v.criterion, v.pass ? "PASS" : "FAIL", v.title, v.measured);
        failures += v.pass ? 0 : 1;
    }
    txt += fmt::format("\n{} of {} criteria pass\n", J.verdicts.size() - static_cast<std::size_t>(failures),
                       J.verdicts.size());
    st.write("report.txt", txt);
    st.manifest.verdicts = J.verdicts;
    st.finish({"report.txt"}, false);
    if (!opt.quiet) fmt::print("{}", txt);
    return failures ? static_cast<int>(ExitCode::criterion_failure) : 0;
}

// ---------------------------------------------------------------- dispatch

namespace {

int dispatch(const std::string& command, const RunConfig& cfg, const RunOptions& opt) {
    if (command == "constants") return cmd_constants(cfg, opt);
    if (command == "lambda0") return cmd_lambda0(cfg, opt);
    if (command == "ground-state") return cmd_ground_state(cfg, opt);
    if (command == "expansion") return cmd_expansion(cfg, opt);
    if (command == "branch") return cmd_branch(cfg, opt);
    if (command == "report") return cmd_report(cfg, opt);
    throw ConfigError(fmt::format("unknown command '{}'", command));
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, const RunOptions& opt) {
    const std::string& who = command;
    try {
        cfg.validate();
        if (command != "all") return dispatch(command, cfg, opt);
        // every computing stage runs twice, the second time uncached, so the
        // report can judge byte-for-byte reproduction from the manifest
        RunOptions replay = opt;
        replay.fresh = true;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& s : stage_names()) {
                if (s == "report") continue;
                say(opt, "== {}{}", s, pass ? " (replay)" : "");
                const auto t0 = std::chrono::steady_clock::now();
                const int rc = dispatch(s, cfg, pass ? replay : opt);
                say(opt, "   ({:.1f} s)", seconds_since(t0));
                if (rc != 0) return rc;
            }
        }
        say(opt, "== report");
        return dispatch("report", cfg, opt);
    } catch (const MissingDependency& e) {
        fmt::print(stderr, "bn6 {}: missing prerequisite stage '{}': {}\n", who, e.stage(), e.what());
        return static_cast<int>(e.exit_code());
    } catch (const Error& e) {
        fmt::print(stderr, "bn6 {}: {}\n", who, e.what());
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        fmt::print(stderr, "bn6 {}: {}\n", who, e.what());
        return static_cast<int>(ExitCode::solver_failure);
    }
}

}  // namespace bn6
