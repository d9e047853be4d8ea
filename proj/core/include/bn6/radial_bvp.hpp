#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bn6/bubble.hpp"
#include "bn6/errors.hpp"
#include "bn6/profile.hpp"
#include "bn6/spectral.hpp"

namespace bn6 {

/// Discretization knobs shared by the radial solvers.
struct SolverSettings {
    std::size_t grid_n = 4096;  ///< intervals of every emitted RadialProfile
    double tol_bc = 1e-9;
    double tol_eig = 1e-6;
    double newton_tol = 1e-11;
    int degree = 16;  ///< Chebyshev degree per collocation element
};

struct LinearizedSpectrum {
    int sector = 0;
    std::vector<double> eigenvalues;  ///< ascending
    [[nodiscard]] int count() const noexcept { return static_cast<int>(eigenvalues.size()); }
};

struct GroundState {
    RadialProfile profile;
    double lambda = 0.0;
    double max_value = 0.0;
    double shooting_residual = 0.0;
    int morse_index = 0;           ///< negative eigenvalues of the ell = 0 linearization
    LinearizedSpectrum morse_data;  ///< lowest ell = 0 eigenvalues
};

/// Newton stagnation on the collocated system; carries the last iterate.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, RadialProfile last, std::vector<double> history)
        : Error(what), last_(std::move(last)), history_(std::move(history)) {}
    [[nodiscard]] const RadialProfile& last_iterate() const noexcept { return last_; }
    [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    RadialProfile last_;
    std::vector<double> history_;
};

/// First Dirichlet eigenvalue of the ball, (j_{2,1} / R)^2.
[[nodiscard]] double first_eigenvalue(const DomainBall& dom);
/// J_2 by its power series; absolute error below 1e-10 for |x| <= 20.
[[nodiscard]] double bessel_j2_series(double x);

/// Smallest shooting value s > 0 with u(R; s) = 0 and no interior zero.
[[nodiscard]] double positive_shooting_value(double lambda, const DomainBall& dom, double tol);

[[nodiscard]] GroundState solve_positive(double lambda, const DomainBall& dom, double tol,
                                         const SolverSettings& cfg = {});

/// Lowest `count` eigenvalues of the ell-th sector of -Delta - V on the ball.
[[nodiscard]] LinearizedSpectrum sector_eigenvalues(const std::function<double(double)>& potential,
                                                    double radius, int ell, int count,
                                                    std::size_t resolution = 4096);
/// Sector spectrum of the linearization -Delta - (2|u| + lambda) around `gs`.
[[nodiscard]] LinearizedSpectrum sector_eigenvalues(const GroundState& gs, int ell, int count);

/// Solves v'' + (5/r) v' + (2|u| + lambda) v + forcing(r) = 0, v'(0) = 0, v(R) = 0.
[[nodiscard]] RadialProfile solve_linearized(const GroundState& gs, const std::function<double(double)>& forcing,
                                             const DomainBall& dom, double tol, const SolverSettings& cfg = {});
/// v0 with forcing u0, after checking the ell = 0 linearization is invertible.
[[nodiscard]] RadialProfile solve_v0(const GroundState& gs, const DomainBall& dom, double tol,
                                     const SolverSettings& cfg = {});

struct CollocatedSolution {
    RadialProfile profile;
    int nodes = 0;
    int newton_steps = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
    double core = 0.0;  ///< inner element size the mesh was graded from
};

/// Damped Newton on the collocated radial equation from `init`.
[[nodiscard]] CollocatedSolution solve_radial_collocation(double lambda, const RadialProfile& init,
                                                          const DomainBall& dom, double tol,
                                                          const SolverSettings& cfg = {});

/// As solve_radial_collocation, but accepts only sign-changing results
/// (NodeCountMismatch otherwise; the caller decides how many nodes it wants).
[[nodiscard]] CollocatedSolution solve_sign_changing(double lambda, const RadialProfile& init,
                                                     const DomainBall& dom, double tol,
                                                     const SolverSettings& cfg = {});

/// Relative imbalance of lambda int u^2 against omega R^6 u'(R)^2 / 2.
[[nodiscard]] double pohozaev_defect(const RadialProfile& u, double lambda);

/// Strong-form residual u'' + 5u'/r + |u|u + lambda u in discrete max norm
/// relative to max|u|^2 (uses the stored curvature).
[[nodiscard]] double strong_defect(const RadialProfile& u, double lambda);

}  // namespace bn6
