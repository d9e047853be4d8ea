#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bn6 {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n);
};

/// Composite Gauss-Legendre over consecutive breakpoints; `f` may be vector-valued
/// through the accumulator callback `(x, w)` receiving node and weight.
void for_each_panel_node(std::span<const double> breaks, const GaussLegendre& rule,
                         const std::function<void(double x, double w)>& visit);

[[nodiscard]] double integrate_panels(std::span<const double> breaks, const GaussLegendre& rule,
                                      const std::function<double(double)>& f);

/// Integrates f over [a, b] (b may be +infinity) by adaptive Gauss-Kronrod and
/// throws QuadratureError when the error estimate exceeds tol * |I|.
[[nodiscard]] double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol,
                                        unsigned max_depth = 20);

/// Plain adaptive estimate with its error estimate (no throwing).
struct AdaptiveResult {
    double value;
    double error;
};
[[nodiscard]] AdaptiveResult adaptive_estimate(const std::function<double(double)>& f, double a, double b,
                                               double tol, unsigned max_depth = 20);

/// Geometric breakpoints between a > 0 and b with at least `per_decade` points per decade.
[[nodiscard]] std::vector<double> geometric_breaks(double a, double b, double per_decade);

/// Sorted union of breakpoint sets restricted to [lo, hi], with near-duplicates
/// (relative gap below `rel_gap`) removed.
[[nodiscard]] std::vector<double> merge_breaks(std::vector<std::vector<double>> sets, double lo, double hi,
                                               double rel_gap = 1e-13);

}  // namespace bn6
