#include "bn6/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "bn6/errors.hpp"

namespace bn6 {

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
}

GaussLegendre::GaussLegendre(std::size_t n) : nodes(n), weights(n) {
    if (n == 0) throw DomainError("GaussLegendre: need at least one node");
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * static_cast<double>(j) - 1.0) * z * p2 - (static_cast<double>(j) - 1.0) * p3) /
                     static_cast<double>(j);
            }
            dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / dp;
            if (std::abs(z - z1) <= 1e-16) break;
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

void for_each_panel_node(std::span<const double> breaks, const GaussLegendre& rule,
                         const std::function<void(double, double)>& visit) {
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k];
        const double b = breaks[k + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) visit(mid + half * rule.nodes[i], half * rule.weights[i]);
    }
}

double integrate_panels(std::span<const double> breaks, const GaussLegendre& rule,
                        const std::function<double(double)>& f) {
    CompensatedSum s;
    for_each_panel_node(breaks, rule, [&](double x, double w) { s.add(w * f(x)); });
    return s.value();
}

AdaptiveResult adaptive_estimate(const std::function<double(double)>& f, double a, double b, double tol,
                                 unsigned max_depth) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tol, &err);
    return {v, err};
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol,
                          unsigned max_depth) {
    const auto [v, err] = adaptive_estimate(f, a, b, tol, max_depth);
    if (!std::isfinite(v) || err > tol * std::max(std::abs(v), std::numeric_limits<double>::min()))
        throw QuadratureError(fmt::format("adaptive quadrature on [{}, {}] did not reach tol {:.1e} (err {:.3e})",
                                          a, b, tol, err));
    return v;
}

std::vector<double> geometric_breaks(double a, double b, double per_decade) {
    if (!(a > 0.0) || !(b > a)) throw DomainError("geometric_breaks: need 0 < a < b");
    const double decades = std::log10(b / a);
    const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade));
    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k] = a * std::pow(b / a, static_cast<double>(k) / static_cast<double>(n));
    out.back() = b;
    return out;
}

std::vector<double> merge_breaks(std::vector<std::vector<double>> sets, double lo, double hi, double rel_gap) {
    std::vector<double> all{lo, hi};
    for (auto& s : sets)
        for (double x : s)
            if (x > lo && x < hi) all.push_back(x);
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    out.reserve(all.size());
    for (double x : all) {
        if (!out.empty() && x - out.back() <= rel_gap * std::max(std::abs(x), 1e-300)) continue;
        out.push_back(x);
    }
    if (out.back() != hi) out.back() = hi;
    return out;
}

}  // namespace bn6
