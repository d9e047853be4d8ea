#include "bn6/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "bn6/errors.hpp"

namespace bn6 {

namespace {

using Poly = std::array<double, 6>;  // coefficients of t^0 .. t^5

// order-th derivative in t of the polynomial c at t.
double poly_eval(const Poly& c, double t, int order) {
    double acc = 0.0;
    for (int k = 5; k >= order; --k) {
        double coeff = c[static_cast<std::size_t>(k)];
        for (int j = 0; j < order; ++j) coeff *= static_cast<double>(k - j);
        acc = acc * t + coeff;
    }
    return acc;
}

constexpr Poly kCubicV0{1, 0, -3, 2, 0, 0};
constexpr Poly kCubicD0{0, 1, -2, 1, 0, 0};
constexpr Poly kCubicV1{0, 0, 3, -2, 0, 0};
constexpr Poly kCubicD1{0, 0, -1, 1, 0, 0};

constexpr Poly kQuinV0{1, 0, 0, -10, 15, -6};
constexpr Poly kQuinD0{0, 1, 0, -6, 8, -3};
constexpr Poly kQuinC0{0, 0, 0.5, -1.5, 1.5, -0.5};
constexpr Poly kQuinC1{0, 0, 0, 0.5, -1.0, 0.5};
constexpr Poly kQuinD1{0, 0, 0, -4, 7, -3};
constexpr Poly kQuinV1{0, 0, 0, 10, -15, 6};

}  // namespace

RadialProfile::RadialProfile(std::vector<double> nodes, std::vector<double> values,
                             std::vector<double> derivs, std::vector<double> curvature)
    : nodes_(std::move(nodes)),
      values_(std::move(values)),
      derivs_(std::move(derivs)),
      curvature_(std::move(curvature)) {
    if (nodes_.size() < 2 || values_.size() != nodes_.size() || derivs_.size() != nodes_.size())
        throw DomainError("RadialProfile: need >= 2 nodes with matching value/derivative columns");
    if (!curvature_.empty() && curvature_.size() != nodes_.size())
        throw DomainError("RadialProfile: curvature column length mismatch");
    if (nodes_.front() != 0.0) throw DomainError("RadialProfile: first node must be r = 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1]))
            throw DomainError("RadialProfile: nodes must be strictly increasing");
}

void RadialProfile::set_curvature(std::vector<double> curvature) {
    if (!curvature.empty() && curvature.size() != nodes_.size())
        throw DomainError("RadialProfile: curvature column length mismatch");
    curvature_ = std::move(curvature);
}

std::size_t RadialProfile::interval(double r) const {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    if (it == nodes_.begin()) return 0;
    const auto idx = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(idx, nodes_.size() - 2);
}

double RadialProfile::eval(double r, int order) const {
    if (nodes_.empty()) throw DomainError("RadialProfile: empty profile");
    const double R = nodes_.back();
    if (r < 0.0 || r > R) {
        if (r < 0.0 && r > -1e-12 * R) r = 0.0;
        else if (r > R && r < R * (1.0 + 1e-12)) r = R;
        else throw DomainError(fmt::format("RadialProfile: r = {} outside [0, {}]", r, R));
    }
    const std::size_t i = interval(r);
    const double a = nodes_[i];
    const double h = nodes_[i + 1] - a;
    const double t = (r - a) / h;
    const double scale = std::pow(h, -order);
    double acc = 0.0;
    if (curvature_.empty()) {
        acc = poly_eval(kCubicV0, t, order) * values_[i] + poly_eval(kCubicD0, t, order) * h * derivs_[i] +
              poly_eval(kCubicV1, t, order) * values_[i + 1] +
              poly_eval(kCubicD1, t, order) * h * derivs_[i + 1];
    } else {
        const double h2 = h * h;
        acc = poly_eval(kQuinV0, t, order) * values_[i] + poly_eval(kQuinD0, t, order) * h * derivs_[i] +
              poly_eval(kQuinC0, t, order) * h2 * curvature_[i] +
              poly_eval(kQuinC1, t, order) * h2 * curvature_[i + 1] +
              poly_eval(kQuinD1, t, order) * h * derivs_[i + 1] +
              poly_eval(kQuinV1, t, order) * values_[i + 1];
    }
    return acc * scale;
}

double RadialProfile::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void RadialProfile::validate(double tol_bc) const {
    if (nodes_.empty()) throw DomainError("RadialProfile: empty profile");
    const double scale = std::max(max_abs(), 1e-300);
    const double R = radius();
    if (std::abs(derivs_.front()) > tol_bc * scale / R)
        throw DomainError(fmt::format("RadialProfile: |u'(0)| = {:.3e} exceeds tol_bc", derivs_.front()));
    if (std::abs(values_.back()) > tol_bc * scale)
        throw DomainError(fmt::format("RadialProfile: |u(R)| = {:.3e} exceeds tol_bc", values_.back()));
}

int RadialProfile::sign_changes(double zero_tol) const noexcept {
    const double floor = zero_tol * max_abs();
    int changes = 0;
    int last = 0;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        const double v = values_[i];
        if (std::abs(v) <= floor) continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

std::vector<double> make_grid(double radius, std::size_t n, double r_min) {
    if (!(radius > 0.0)) throw DomainError("make_grid: radius must be positive");
    if (n < 8) throw DomainError("make_grid: need at least 8 intervals");
    const double r_mid = 0.25 * radius;
    r_min = std::clamp(r_min, 1e-300, 0.125 * radius);
    const std::size_t n_geo = n / 2;
    const std::size_t n_tail = n - 1 - n_geo;
    std::vector<double> r;
    r.reserve(n + 1);
    r.push_back(0.0);
    const double log_ratio = std::log(r_mid / r_min) / static_cast<double>(n_geo);
    for (std::size_t k = 0; k < n_geo; ++k) r.push_back(r_min * std::exp(log_ratio * static_cast<double>(k)));
    for (std::size_t k = 0; k <= n_tail; ++k) {
        const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_tail));
        r.push_back(r_mid + (radius - r_mid) * s);
    }
    r.back() = radius;
    return r;
}

RadialProfile sample_profile(std::span<const double> nodes, const RadialSampler& f) {
    std::vector<double> x(nodes.begin(), nodes.end());
    std::vector<double> u(x.size()), du(x.size()), d2u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f(x[i], u[i], du[i], d2u[i]);
    return RadialProfile(std::move(x), std::move(u), std::move(du), std::move(d2u));
}

void write_profile(std::ostream& os, const RadialProfile& p) {
    os << fmt::format("# bn6 radial-profile R={:.17g} N={}\n", p.radius(), p.size() - 1);
    const auto r = p.nodes();
    const auto u = p.values();
    const auto du = p.derivs();
    for (std::size_t i = 0; i < p.size(); ++i) os << fmt::format("{:.17g} {:.17g} {:.17g}\n", r[i], u[i], du[i]);
}

RadialProfile read_profile(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# bn6 radial-profile", 0) != 0)
        throw DomainError("read_profile: missing '# bn6 radial-profile' header");
    const auto npos = header.find("N=");
    if (npos == std::string::npos) throw DomainError("read_profile: header lacks N=");
    const std::size_t n = std::stoul(header.substr(npos + 2));
    std::vector<double> r, u, du;
    r.reserve(n + 1);
    u.reserve(n + 1);
    du.reserve(n + 1);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double a = 0, b = 0, c = 0;
        if (!(ls >> a >> b >> c)) throw DomainError("read_profile: malformed row '" + line + "'");
        r.push_back(a);
        u.push_back(b);
        du.push_back(c);
    }
    if (r.size() != n + 1)
        throw DomainError(fmt::format("read_profile: expected {} rows, found {}", n + 1, r.size()));
    return RadialProfile(std::move(r), std::move(u), std::move(du));
}

}  // namespace bn6
