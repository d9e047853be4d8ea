#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bn6/profile.hpp"

namespace bn6 {

/// Chebyshev-Gauss-Lobatto elements on [0, R]: `breaks` are element ends,
/// each element carries degree + 1 nodes (shared ends are duplicated).
class ChebMesh {
public:
    ChebMesh(std::vector<double> breaks, int degree);

    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] std::size_t elements() const noexcept { return breaks_.size() - 1; }
    [[nodiscard]] std::size_t unknowns() const noexcept { return elements() * static_cast<std::size_t>(degree_ + 1); }
    [[nodiscard]] std::span<const double> breaks() const noexcept { return breaks_; }
    [[nodiscard]] double radius() const noexcept { return breaks_.back(); }

    /// Physical node j of element e.
    [[nodiscard]] double node(std::size_t e, int j) const noexcept;
    /// All nodes, element-major.
    [[nodiscard]] std::vector<double> all_nodes() const;
    /// Reference CGL nodes on [-1, 1], ascending.
    [[nodiscard]] std::span<const double> reference_nodes() const noexcept { return ref_; }
    /// Reference first-derivative matrix, row-major (degree+1)^2.
    [[nodiscard]] std::span<const double> reference_diff() const noexcept { return diff_; }
    [[nodiscard]] std::size_t element_of(double r) const;

private:
    std::vector<double> breaks_;
    int degree_;
    std::vector<double> ref_;
    std::vector<double> diff_;
    std::vector<double> bary_;

    friend class PiecewiseCheb;
};

/// Element ends graded for a radial function whose structure lives at scale
/// `core` near the origin: [0, core], then geometric growth by `ratio` with
/// element length capped at `max_len`.
[[nodiscard]] ChebMesh graded_mesh(double radius, double core, int degree, double ratio = 1.35,
                                   double max_len_frac = 0.1);

/// A function represented by its values at the CGL nodes of a mesh.
class PiecewiseCheb {
public:
    PiecewiseCheb(ChebMesh mesh, std::vector<double> values);

    [[nodiscard]] const ChebMesh& mesh() const noexcept { return mesh_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double eval(double r, int order = 0) const;
    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] int sign_changes(double zero_tol = 1e-12) const noexcept;

    /// Samples value, derivative and curvature onto `nodes` (which must span [0, R]).
    [[nodiscard]] RadialProfile to_profile(std::span<const double> nodes) const;

private:
    ChebMesh mesh_;
    std::vector<double> values_;
    std::vector<double> d1_;
    std::vector<double> d2_;
};

/// Radial problem u'' + (k/r) u' + F(r, u) = 0 with u'(0) = 0, u(R) = 0.
struct RadialProblem {
    double first_order_coeff = 5.0;
    /// Fills F(r, u) and dF/du.
    std::function<void(double r, double u, double& f, double& df)> reaction;
    /// Optional: adds c * border(r) to the equation with c a further unknown,
    /// closed by u(0) = 0.
    std::function<double(double r)> border;
};

struct CollocationOptions {
    double step_tol = 1e-11;  ///< on the Newton step in element-scaled variables
    /// Also stop once the row-equilibrated residual norm falls below this; the
    /// bubble-scaling direction is nearly singular, so steps stall above step_tol
    /// long after the residual has hit rounding level.
    double residual_tol = 1e-12;
    int max_iter = 40;
};

struct CollocationResult {
    std::vector<double> values;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  ///< scaled residual norm before each step
    double final_residual = 0.0;
    double multiplier = 0.0;  ///< c when the problem is bordered
};

/// Damped Newton on the collocated system from `initial` (nodal values on `mesh`).
[[nodiscard]] CollocationResult solve_collocation(const ChebMesh& mesh, const RadialProblem& problem,
                                                  std::vector<double> initial, const CollocationOptions& opt = {});

/// Initial guess on the mesh nodes from any radial function.
[[nodiscard]] std::vector<double> sample_on_mesh(const ChebMesh& mesh, const std::function<double(double)>& f);

}  // namespace bn6
