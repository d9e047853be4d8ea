#include "bn6/bubble.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "bn6/errors.hpp"

namespace bn6 {

double norm(const Point6& x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double distance(const Point6& x, const Point6& y) noexcept {
    double s = 0.0;
    for (int i = 0; i < kDim; ++i) {
        const double d = x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

double dot(const Point6& x, const Point6& y) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(const Point6& x) noexcept { return dot(x, x); }

}  // namespace

BubbleParams BubbleParams::scaled(double eps, double d, const Point6& eta, const Point6& xi0, double sigma) {
    if (eps == 0.0) throw DomainError("BubbleParams: eps must be nonzero");
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("BubbleParams: sigma must lie in (0, 1)");
    if (d < sigma || d > 1.0 / sigma)
        throw DomainError(fmt::format("BubbleParams: d = {} outside [{}, {}]", d, sigma, 1.0 / sigma));
    if (norm(eta) > 1.0 / sigma) throw DomainError("BubbleParams: |eta| exceeds 1/sigma");
    BubbleParams p;
    p.d = d;
    p.eta = eta;
    p.delta = std::abs(eps) * d;
    const double s = std::sqrt(p.delta);
    for (std::size_t i = 0; i < p.xi.size(); ++i) p.xi[i] = xi0[i] + s * eta[i];
    return p;
}

void BubbleParams::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("BubbleParams: delta must be positive");
}

DomainBall::DomainBall(double r) : radius(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("DomainBall: radius must be positive");
}

bool DomainBall::contains(const Point6& x) const noexcept { return norm(x) <= radius * (1.0 + 1e-14); }

KernelIndex::KernelIndex(int j) : j_(j) {
    if (j < 0 || j > kDim) throw DomainError(fmt::format("KernelIndex: j = {} outside 0..6", j));
}

double alpha6() noexcept {
    constexpr double n = kDim;
    return std::pow(n * (n - 2.0), (n - 2.0) / 4.0);
}

double sphere_area(int n) noexcept {
    const double h = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double omega6() noexcept { return sphere_area(kDim); }

double eval_bubble(const BubbleParams& p, const Point6& x) noexcept {
    const double d2 = p.delta * p.delta;
    const double r = distance(x, p.xi);
    const double q = d2 + r * r;
    return alpha6() * d2 / (q * q);
}

double eval_kernel(const BubbleParams& p, KernelIndex k, const Point6& x) noexcept {
    Point6 y{};
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - p.xi[i];
    const double d = p.delta;
    const double r2 = norm2(y);
    const double q = d * d + r2;
    const double q3 = q * q * q;
    const double a = alpha6();
    if (k.value() == 0) return 2.0 * a * d * (r2 - d * d) / q3;
    return 4.0 * a * d * d * y[static_cast<std::size_t>(k.value() - 1)] / q3;
}

double regular_part_ball(const Point6& x, const Point6& y, const DomainBall& dom) {
    if (!dom.contains(x) || !dom.contains(y)) throw DomainError("regular_part_ball: point outside the ball");
    const double R2 = dom.radius * dom.radius;
    const double q = R2 - 2.0 * dot(x, y) + norm2(x) * norm2(y) / R2;
    return 1.0 / (q * q);
}

Point6 regular_part_ball_grad_y(const Point6& x, const Point6& y, const DomainBall& dom) {
    if (!dom.contains(x) || !dom.contains(y)) throw DomainError("regular_part_ball: point outside the ball");
    const double R2 = dom.radius * dom.radius;
    const double x2 = norm2(x);
    const double q = R2 - 2.0 * dot(x, y) + x2 * norm2(y) / R2;
    const double c = -2.0 / (q * q * q);
    Point6 g{};
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = c * (-2.0 * x[i] + 2.0 * x2 * y[i] / R2);
    return g;
}

double eval_projected_kernel(const BubbleParams& p, KernelIndex k, const Point6& x, const DomainBall& dom) {
    const double z = eval_kernel(p, k, x);
    const double a = alpha6();
    if (k.value() == 0) return z - 2.0 * p.delta * a * regular_part_ball(x, p.xi, dom);
    const Point6 g = regular_part_ball_grad_y(x, p.xi, dom);
    return z - p.delta * p.delta * a * g[static_cast<std::size_t>(k.value() - 1)];
}

CentralBubble::CentralBubble(double delta, double radius) : delta_(delta), radius_(radius) {
    if (!(delta > 0.0)) throw DomainError("CentralBubble: delta must be positive");
    if (!(radius > 0.0)) throw DomainError("CentralBubble: radius must be positive");
    const double q = delta * delta + radius * radius;
    shift_ = alpha6() * delta * delta / (q * q);
}

double CentralBubble::bubble(double r) const noexcept {
    const double q = delta_ * delta_ + r * r;
    return alpha6() * delta_ * delta_ / (q * q);
}

double CentralBubble::bubble_deriv(double r) const noexcept {
    const double q = delta_ * delta_ + r * r;
    return -4.0 * alpha6() * delta_ * delta_ * r / (q * q * q);
}

double CentralBubble::bubble_second(double r) const noexcept {
    const double d2 = delta_ * delta_;
    const double q = d2 + r * r;
    // d/dr [-4 a d^2 r q^-3] = -4 a d^2 (q - 6 r^2) q^-4
    return -4.0 * alpha6() * d2 * (q - 6.0 * r * r) / (q * q * q * q);
}

RadialProfile project_bubble_central(const BubbleParams& p, const DomainBall& dom, std::span<const double> nodes) {
    p.validate();
    if (norm(p.xi) != 0.0) throw DomainError("project_bubble_central: xi must be the ball center");
    const CentralBubble b(p.delta, dom.radius);
    std::vector<double> grid;
    if (nodes.empty()) {
        grid = make_grid(dom.radius, 4096, 1e-2 * p.delta);
        nodes = grid;
    }
    return sample_profile(nodes, [&](double r, double& u, double& du, double& d2u) {
        u = b.projected(r);
        du = b.bubble_deriv(r);
        d2u = b.bubble_second(r);
    });
}

BubbleIntegrals bubble_integrals() noexcept {
    const double a = alpha6();
    const double w = omega6();
    return {a * a * a * w * std::beta(3.0, 3.0) / 2.0, w * std::beta(3.0, 1.0) / 2.0};
}

}  // namespace bn6
