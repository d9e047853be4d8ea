#pragma once

#include <array>
#include <span>

#include "bn6/profile.hpp"

namespace bn6 {

inline constexpr int kDim = 6;
using Point6 = std::array<double, kDim>;

[[nodiscard]] double norm(const Point6& x) noexcept;
[[nodiscard]] double distance(const Point6& x, const Point6& y) noexcept;

/// Concentration scale and center of a bubble, plus the scaled coordinates
/// (d, eta) with delta = |eps| d and xi = xi0 + sqrt(delta) eta.
struct BubbleParams {
    double delta = 1.0;
    Point6 xi{};
    double d = 0.0;
    Point6 eta{};

    /// Builds delta = |eps| d, xi = xi0 + sqrt(delta) eta and checks the
    /// admissible window sigma <= d <= 1/sigma, |eta| <= 1/sigma.
    [[nodiscard]] static BubbleParams scaled(double eps, double d, const Point6& eta, const Point6& xi0,
                                             double sigma);
    void validate() const;
};

/// The ball of radius R centered at the origin.
struct DomainBall {
    double radius = 1.0;

    DomainBall() = default;
    explicit DomainBall(double r);
    [[nodiscard]] bool contains(const Point6& x) const noexcept;
};

/// Selects Z^j: j = 0 is d/d delta, j = 1..6 are d/d xi_j.
class KernelIndex {
public:
    explicit KernelIndex(int j);
    [[nodiscard]] int value() const noexcept { return j_; }

private:
    int j_;
};

/// (n(n-2))^((n-2)/4) at n = 6.
[[nodiscard]] double alpha6() noexcept;
/// Surface area of the unit sphere S^5, 2 pi^3 / Gamma(3) = pi^3.
[[nodiscard]] double omega6() noexcept;
/// 2 pi^(n/2) / Gamma(n/2).
[[nodiscard]] double sphere_area(int n) noexcept;

[[nodiscard]] double eval_bubble(const BubbleParams& p, const Point6& x) noexcept;
[[nodiscard]] double eval_kernel(const BubbleParams& p, KernelIndex k, const Point6& x) noexcept;

/// Regular part of the Green's function of the ball with boundary trace
/// |x - y|^-4, by the method of images:
///   H(x, y) = (R^2 - 2 x.y + |x|^2 |y|^2 / R^2)^-2.
/// Throws DomainError when x or y lies outside the closed ball.
[[nodiscard]] double regular_part_ball(const Point6& x, const Point6& y, const DomainBall& dom);
/// Gradient of H(x, .) with respect to its second argument.
[[nodiscard]] Point6 regular_part_ball_grad_y(const Point6& x, const Point6& y, const DomainBall& dom);

/// Leading-order projection P Z^j = Z^j - (2 delta alpha H or delta^2 alpha d_{xi_j} H).
/// Only an expansion; the projected kernels are never solved for.
[[nodiscard]] double eval_projected_kernel(const BubbleParams& p, KernelIndex k, const Point6& x,
                                           const DomainBall& dom);

/// Closed-form radial evaluation of U_{delta,0} and of its exact projection on
/// the ball, P U = U - alpha delta^2 / (delta^2 + R^2)^2.
class CentralBubble {
public:
    CentralBubble(double delta, double radius);

    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    /// The constant subtracted by the projection (U's boundary trace).
    [[nodiscard]] double shift() const noexcept { return shift_; }

    [[nodiscard]] double bubble(double r) const noexcept;
    [[nodiscard]] double bubble_deriv(double r) const noexcept;
    [[nodiscard]] double bubble_second(double r) const noexcept;
    [[nodiscard]] double projected(double r) const noexcept { return bubble(r) - shift_; }

private:
    double delta_;
    double radius_;
    double shift_;
};

/// P U_{delta,0} sampled on `nodes` (or on a default grid graded to delta when empty).
[[nodiscard]] RadialProfile project_bubble_central(const BubbleParams& p, const DomainBall& dom,
                                                   std::span<const double> nodes = {});

struct BubbleIntegrals {
    double intU3;  ///< integral over R^6 of U_{1,0}^3
    double intW4;  ///< integral over R^6 of (1 + |y|^2)^-4
};

/// Beta-function reductions: alpha^3 omega B(3,3)/2 and omega B(3,1)/2.
[[nodiscard]] BubbleIntegrals bubble_integrals() noexcept;

}  // namespace bn6
