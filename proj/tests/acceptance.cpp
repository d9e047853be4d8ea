// Runs the default pipeline twice into separate directories and judges the
// ten acceptance criteria from the files it wrote. Tolerances live here, not
// in the library, so a change to the library cannot loosen them.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <fmt/format.h>

#include "json.hpp"

#include "bn6/config.hpp"
#include "bn6/pipeline.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr double kA1Tol = 1e-10;         // a1/omega6 vs 96, relative
constexpr double kU3Tol = 1e-8;          // int U^3 closed vs quadrature, relative
constexpr double kSlopeTarget = 4.0;     // projection expansion
constexpr double kSlopeTol = 0.3;
constexpr double kEigTol = 1e-6;         // first eigenvalue vs j_{2,1}^2
constexpr double kLambda0Res = 1e-8;
constexpr double kV00Margin = 1e-4;
constexpr double kDefectSpread = 2.0;    // residual ratio max/min
constexpr double kAtD0Tol = 0.05;
constexpr double kWindowTol = 0.10;
constexpr double kI5Tol = 0.10;
constexpr double kI4Tol = 0.05;
constexpr double kHighOrder = 3.9;
constexpr double kR2 = 0.99;
constexpr double kRateTol = 0.15;
constexpr double kRemainderSlope = 1.8;
constexpr double kLevelTol = 0.02;
constexpr double kEpsEnergy = 0.0031622776601683794;  // 10^-2.5

Json load(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw std::runtime_error("cannot open " + p.string());
    return Json::parse(is);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

double num(const Json& j, const char* key) {
    const Json& v = j.at(key);
    return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

const Json& nearest_eps(const Json& arr, double target) {
    const Json* best = &arr.at(0);
    for (const auto& e : arr)
        if (std::abs(std::abs(e.at("eps").get<double>()) - target) <
            std::abs(std::abs(best->at("eps").get<double>()) - target))
            best = &e;
    return *best;
}

const Json& smallest_eps(const Json& arr) {
    const Json* best = &arr.at(0);
    for (const auto& e : arr)
        if (std::abs(e.at("eps").get<double>()) < std::abs(best->at("eps").get<double>())) best = &e;
    return *best;
}

struct Tally {
    int failed = 0;
    void line(int n, bool pass, const std::string& title, const std::string& measured) {
        std::cout << fmt::format("criterion {:>2} {}  {}: {}", n, pass ? "PASS" : "FAIL", title, measured) << std::endl;
        failed += pass ? 0 : 1;
    }
};

int run_pipeline(const fs::path& dir) {
    fs::remove_all(dir);
    bn6::RunConfig cfg;
    cfg.output_dir = dir;
    bn6::RunOptions opt;
    opt.quiet = true;
    opt.jobs = std::max(1u, std::thread::hardware_concurrency());
    return bn6::run_command("all", cfg, opt);
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "bn6-acceptance";
    const fs::path A = root / "run-a", B = root / "run-b";
    const int rc_a = run_pipeline(A);
    const int rc_b = run_pipeline(B);
    std::cout << fmt::format("pipeline exit codes: {} and {} (1 means a criterion failed inside the report)\n", rc_a, rc_b);
    if (rc_a > 1 || rc_b > 1) {
        std::cout << "pipeline did not complete; no criteria judged\n";
        return 2;
    }

    const Json cj = load(A / "constants.json"), lj = load(A / "lambda0.json"), gj = load(A / "ground_state.json");
    const Json ej = load(A / "expansion.json"), bj = load(A / "branch.json");
    Tally T;

    {
        const double pi3 = std::pow(std::numbers::pi, 3);
        const double a1q = num(cj, "a1_over_omega6_quadrature"), a1c = num(cj, "a1_over_omega6");
        const double e96 = std::max(std::abs(a1q - 96.0), std::abs(a1c - 96.0)) / 96.0;
        // 24^3 * pi^3 * B(3,3) / 2 = 230.4 pi^3
        const double u3 = std::abs(num(cj, "intU3_quadrature") - 230.4 * pi3) / (230.4 * pi3);
        const double a = num(cj, "alpha6");
        T.line(1, e96 <= kA1Tol && a == 24.0 && u3 <= kU3Tol, "constants",
               fmt::format("a1/omega6 rel {:.2e}, alpha6 {}, int U^3 rel {:.2e}", e96, a, u3));
    }
    {
        const double s = cj.at("projection").at("loglog_slope").get<double>();
        T.line(2, std::abs(s - kSlopeTarget) <= kSlopeTol, "projection expansion", fmt::format("slope {:.4f}", s));
    }
    {
        const double z = boost::math::cyl_bessel_j_zero(2.0, 1);
        const double gap = std::abs(num(lj, "lambda1_sector_solver") - z * z);
        T.line(3, gap <= kEigTol, "first Dirichlet eigenvalue",
               fmt::format("solver {:.10f} vs j_21^2 {:.10f}, gap {:.2e}", num(lj, "lambda1_sector_solver"), z * z, gap));
    }
    {
        const bool sign = num(lj, "f_low") < 0.0 && num(lj, "f_high") > 0.0;
        const double res = num(lj, "fixed_point_residual");
        const double l0 = num(lj, "lambda0"), l1 = num(lj, "lambda1");
        double mu = std::numeric_limits<double>::infinity();
        for (const auto& m : gj.at("sector_min_abs_mu")) mu = std::min(mu, m.get<double>());
        const double v00 = std::abs(1.0 - 2.0 * num(gj.at("constants"), "v0_at_center"));
        const double tol_eig = bn6::RunConfig{}.tol_eig;
        const bool ok = sign && l0 > 0 && l0 < l1 && res < kLambda0Res && gj.at("sector_min_abs_mu").size() >= 11 &&
                        mu > tol_eig && v00 > kV00Margin;
        T.line(4, ok, "lambda0 and assumptions",
               fmt::format("lambda0 {:.12f}, |f| {:.2e}, min |mu| over ell<=10 {:.4g}, |1-2v0(0)| {:.4g}", l0, res, mu, v00));
    }
    const Json& per = ej.at("per_eps");
    {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& p : per) {
            const double r = num(p, "residual_ratio_at_d0");
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        T.line(5, hi < kDefectSpread * lo && per.size() >= 2, "defect scaling",
               fmt::format("ratio spread {:.4f} over {} eps values", hi / lo, per.size()));
    }
    {
        const Json& p = nearest_eps(per, kEpsEnergy);
        const double e0 = num(p, "relative_error_at_d0"), ew = num(p, "window_error_half_to_double_d0");
        const double d0 = num(ej, "d0"), step = num(ej, "d_grid_step");
        const double am = num(smallest_eps(per), "argmax_d_measured");
        const bool ok = e0 <= kAtD0Tol && ew <= kWindowTol && std::abs(am - d0) <= step * (1 + 1e-9);
        T.line(6, ok, "reduced-energy law",
               fmt::format("eps {:.4g}: measured {:.6g} vs predicted {:.6g} (rel {:.3g}); window {:.3g}; argmax {:.4g} vs d0 "
                           "{:.4g}",
                           p.at("eps").get<double>(), num(p, "upsilon_measured_at_d0"), num(p, "upsilon_predicted_at_d0"),
                           e0, ew, am, d0));
    }
    {
        const Json& t = nearest_eps(ej.at("iterms"), kEpsEnergy);
        const double r5 = num(t, "i5_over_display"), r4 = num(t, "i4_over_display");
        const double o6 = num(ej, "i6_order"), o7 = num(ej, "i7_order");
        const bool ok = std::abs(r5 - 1) <= kI5Tol && std::abs(r4 - 1) <= kI4Tol && o6 >= kHighOrder && o7 >= kHighOrder;
        T.line(7, ok, "I-term audit",
               fmt::format("I5/display {:.4f}, I4/display {:.4f}, orders I6 {:.3f} I7 {:.3f}", r5, r4, o6, o7));
    }
    {
        const Json& t = bj.at("theorem");
        bool ok = false;
        std::string m = t.at("status").get<std::string>();
        if (!t.at("fit").is_null()) {
            const Json& f = t.at("fit");
            const double r2 = num(f, "r_squared"), d = num(f, "d_fitted"), d0 = num(bj, "d0");
            const double gap = std::abs(d - d0) / d0, sl = num(f, "remainder_slope");
            ok = t.at("all_single_node").get<bool>() && r2 > kR2 && gap <= kRateTol && sl >= kRemainderSlope;
            m += fmt::format(": d_fit {:.6g} vs d0 {:.6g} (gap {:.3g}), r^2 {:.6f}, remainder slope {:.3f}", d, d0, gap, r2,
                             sl);
        } else {
            m += ", no fit";
        }
        T.line(8, ok, "blow-up rate on the theorem-sign branch", m);
    }
    {
        const Json& l = smallest_eps(ej.at("levelset"));
        const double gap = std::abs(num(l, "ratio") - num(ej, "R0")) / num(ej, "R0");
        T.line(9, gap <= kLevelTol, "level-set radius",
               fmt::format("eps {:.4g}: {:.6g} vs R0 {:.6g}, gap {:.3g}", l.at("eps").get<double>(), num(l, "ratio"),
                           num(ej, "R0"), gap));
    }
    {
        int same = 0;
        std::vector<std::string> differ;
        for (const auto& e : fs::directory_iterator(A)) {
            const fs::path p = e.path();
            const std::string ext = p.extension().string();
            if ((ext != ".csv" && ext != ".json") || p.filename() == "manifest.json") continue;
            const fs::path q = B / p.filename();
            if (fs::exists(q) && slurp(p) == slurp(q)) ++same;
            else differ.push_back(p.filename().string());
        }
        std::string m = fmt::format("{} CSV/JSON files byte-identical across two runs", same);
        for (const auto& d : differ) m += ", differs: " + d;
        T.line(10, differ.empty() && same >= 10, "determinism", m);
    }

    std::cout << fmt::format("{} of 10 criteria pass\n", 10 - T.failed);
    return T.failed == 0 ? 0 : 1;
}
