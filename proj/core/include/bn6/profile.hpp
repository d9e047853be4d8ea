#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace bn6 {

/// Nodes, values and first derivatives of a radial function on [0, R].
///
/// Evaluation between nodes is piecewise cubic Hermite (C^1). When the
/// producer also knows second derivatives at the nodes (every solver in this
/// library does), they are stored in `curvature` and evaluation upgrades to
/// quintic Hermite (C^2), which is what keeps |eps|^3-sized energy differences
/// above interpolation noise.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(std::vector<double> nodes, std::vector<double> values, std::vector<double> derivs,
                  std::vector<double> curvature = {});

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }
    [[nodiscard]] double radius() const noexcept { return nodes_.empty() ? 0.0 : nodes_.back(); }
    [[nodiscard]] bool has_curvature() const noexcept { return !curvature_.empty(); }

    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const double> derivs() const noexcept { return derivs_; }
    [[nodiscard]] std::span<const double> curvature() const noexcept { return curvature_; }

    [[nodiscard]] double value(double r) const { return eval(r, 0); }
    [[nodiscard]] double deriv(double r) const { return eval(r, 1); }
    /// Second derivative of the interpolant (piecewise linear in the cubic case).
    [[nodiscard]] double second(double r) const { return eval(r, 2); }
    [[nodiscard]] double eval(double r, int order) const;

    /// Checks the structural invariants plus u'(0) = 0 and u(R) = 0 within tol_bc
    /// (relative to max|u|). Throws DomainError on violation.
    void validate(double tol_bc) const;

    [[nodiscard]] double max_abs() const noexcept;

    /// Number of strict sign changes among node values on [0, R), skipping
    /// samples below `zero_tol * max|u|`.
    [[nodiscard]] int sign_changes(double zero_tol = 1e-12) const noexcept;

    void set_curvature(std::vector<double> curvature);

private:
    [[nodiscard]] std::size_t interval(double r) const;

    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> derivs_;
    std::vector<double> curvature_;
};

/// Grid on [0, R] with geometric refinement near 0 (starting at r_min) and
/// sine clustering toward R; n intervals, n + 1 nodes, first node 0.
[[nodiscard]] std::vector<double> make_grid(double radius, std::size_t n, double r_min);

/// Samples a function given as (value, derivative, second derivative) at every node.
using RadialSampler = std::function<void(double r, double& u, double& du, double& d2u)>;
[[nodiscard]] RadialProfile sample_profile(std::span<const double> nodes, const RadialSampler& f);

/// Columnar text format: `# bn6 radial-profile R=<R> N=<N>` followed by
/// `r value deriv` rows in 17 significant digits. N counts intervals.
void write_profile(std::ostream& os, const RadialProfile& p);
[[nodiscard]] RadialProfile read_profile(std::istream& is);

}  // namespace bn6
