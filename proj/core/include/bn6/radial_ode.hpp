#pragma once

#include <functional>
#include <span>

#include "bn6/profile.hpp"

namespace bn6 {

struct ShootOptions {
    double rtol = 1e-13;
    double atol_rel = 1e-15;  ///< absolute tolerance as a fraction of |s|
};

struct ShotResult {
    double u_end = 0.0;
    double du_end = 0.0;
    int sign_changes = 0;  ///< strict sign changes of u on (0, R)
};

/// Integrates u'' + (5/r) u' + |u| u + lambda u = 0 from the Taylor seed
/// u ~ s - g r^2 / 12 + b r^4 to r = R.
[[nodiscard]] ShotResult shoot(double s, double lambda, double radius, const ShootOptions& opt = {});

/// Same integration, recording value, derivative and curvature at `nodes`.
[[nodiscard]] RadialProfile shoot_profile(double s, double lambda, std::span<const double> nodes,
                                          const ShootOptions& opt = {});

/// Sector problem phi'' + ((2 ell + 5)/r) phi' + (V(r) + mu) phi = 0 with
/// phi(0) = 1 regular; psi = r^ell phi is the ell-th harmonic component.
struct SectorShot {
    double phi_end = 0.0;
    int zeros = 0;  ///< sign changes of phi on (0, R)
};
[[nodiscard]] SectorShot shoot_sector(const std::function<double(double)>& potential, int ell, double mu,
                                      double radius, const ShootOptions& opt = {});

}  // namespace bn6
