#pragma once

#include <string>
#include <vector>

#include "bn6/critical.hpp"
#include "bn6/errors.hpp"
#include "bn6/expansion.hpp"
#include "bn6/radial_bvp.hpp"

namespace bn6 {

struct BranchPoint {
    double eps = 0.0;
    double lambda = 0.0;
    RadialProfile profile;
    double delta_extracted = 0.0;
    int node_count = 0;
    double newton_residual = 0.0;
    int newton_steps = 0;
    double phi_norm_proxy = 0.0;
    double u_min = 0.0;
    double pohozaev = 0.0;       ///< relative Pohozaev imbalance
    double strong_defect = 0.0;  ///< max-norm defect relative to max|u|^2
};

struct RateFit {
    double d_fitted = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double eps_min = 0.0;  ///< smallest |eps| used
    double eps_max = 0.0;  ///< largest |eps| used
    double d0_predicted = 0.0;
    double relative_gap = 0.0;
    double remainder_slope = 0.0;  ///< log-log slope of phi_norm_proxy against |eps|
    int points = 0;
};

/// Continuation could not reach a target; carries everything accepted so far.
class BranchStall : public Error {
public:
    BranchStall(const std::string& what, std::vector<BranchPoint> partial)
        : Error(what), partial_(std::move(partial)) {}
    [[nodiscard]] const std::vector<BranchPoint>& partial() const noexcept { return partial_; }

private:
    std::vector<BranchPoint> partial_;
};

struct BranchOptions {
    SolverSettings solver;
    double sigma = 0.01;
    int max_halvings = 10;
    std::vector<double> eps_growth{1.0, 2.0, 5.0};  ///< seed retries at these multiples of |eps0|
    std::vector<double> extra_d;                    ///< seed candidates tried after the d0 ladder
    bool allow_any_sign = false;                    ///< dichotomy runs seed against the theorem case
};

/// Scans c(d) over {d0/2, d0, 2 d0, extra_d...} for a sign change, then larger |eps0|.
[[nodiscard]] BranchPoint seed_branch(const GroundState& gs, const RadialProfile& v0, const ReducedEnergyConstants& c,
                                      double eps0, const BranchOptions& opt = {});

/// Solutions are computed in remainder form u = W + phi with the bubble part of
/// W exact, so rounding scales with phi rather than with the bubble height. The
/// bubble scale is fixed by a reduced scalar equation: with c z added to the
/// equation (z concentrated on the core) and phi(0) = 0 imposed, c(d) = 0
/// selects d. At small |eps| the scaling direction is too close to singular
/// for plain Newton to move d.
[[nodiscard]] double reduced_multiplier(const GroundState& gs, const RadialProfile& v0, double eps, double d,
                                        const BranchOptions& opt = {});

/// Root of c(d) bracketed by widening around d, then an unbordered Newton check
/// (NodeCountMismatch unless exactly one interior sign change).
[[nodiscard]] BranchPoint solve_branch_point_at(const GroundState& gs, const RadialProfile& v0, double eps, double d,
                                                const BranchOptions& opt = {});

/// Plain remainder-form Newton started from an arbitrary sign-changing profile.
[[nodiscard]] BranchPoint solve_branch_point(const GroundState& gs, const RadialProfile& v0, double eps,
                                             const RadialProfile& init, const BranchOptions& opt = {});

/// Natural-parameter continuation in eps with a secant predictor on d = delta/|eps|.
[[nodiscard]] std::vector<BranchPoint> continue_branch(const BranchPoint& start, const GroundState& gs,
                                                       const RadialProfile& v0, const std::vector<double>& eps_targets,
                                                       const BranchOptions& opt = {});

/// sqrt(alpha / (u0(0) - min u)).
[[nodiscard]] double extract_delta(const RadialProfile& u, double u0_center);
[[nodiscard]] double extract_delta(const BranchPoint& p, const GroundState& gs);

/// H^1_0 norm of u - W(eps, delta).
[[nodiscard]] double phi_norm_proxy(const RadialProfile& u, const GroundState& gs, const RadialProfile& v0, double eps,
                                    double delta);

/// Least squares delta = d |eps| + b over the branch.
[[nodiscard]] RateFit fit_blowup_rate(const std::vector<BranchPoint>& branch, const ReducedEnergyConstants& c);
[[nodiscard]] RateFit fit_blowup_rate(const std::vector<BranchPoint>& branch, double d0_predicted);

}  // namespace bn6
