#pragma once

// Power-law fits of the Legendre transform near the image of the origin:
// |grad u~(q) - grad u~(b)| ~ C r^alpha and |lambda_min(D^2 u~)| ~ C r^beta.

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "sle/error.hpp"
#include "sle/jet.hpp"
#include "sle/legendre.hpp"

namespace sle {

struct RayProfile {
  Eigen::Vector3d direction;
  std::vector<double> radii;   // strictly decreasing
  std::vector<double> values;
};

struct PowerFit {
  double exponent = 0.0;  // alpha or beta
  double constant = 0.0;  // C
  double residual = 0.0;  // max |log value - fitted line|
  int n_points = 0;       // points used after dropping the guards
};

/// r0, r0 rho, ..., r0 rho^(count-1).
std::vector<double> geometric_radii(double r0, double rho, int count);

/// Root of u_z(0, 0, z) = w on [-radius, radius] by bisection to 1e-15.
/// Reads the axis polynomial straight from the jet's rational coefficients.
/// Throws NOT_MONOTONE when u_z is not monotone on the interval or w is not
/// bracketed.
long double axis_inverse_oracle(const Jet& u, long double w, long double radius = 0.1L);

/// Least-squares slope of log(value) against log(radius), after dropping the
/// largest and smallest radius. Needs at least 8 points, all positive and finite.
PowerFit holder_fit(const RayProfile& profile);
PowerFit blowup_fit(const RayProfile& profile);

/// |grad u~(b + r d) - grad u~(b)|, using grad u~ = (grad u)^-1.
template <typename Scalar>
RayProfile holder_profile(const LegendreTransform<Scalar>& lt, const Eigen::Vector3d& direction,
                          const std::vector<double>& radii) {
  RayProfile prof{direction.normalized(), radii, {}};
  const Vec3<Scalar> p0 = lt.invert(lt.singular_image());
  for (double r : radii) {
    const Vec3<Scalar> q = lt.singular_image() + prof.direction.template cast<Scalar>() * Scalar(r);
    prof.values.push_back(static_cast<double>((lt.invert(q) - p0).norm()));
  }
  return prof;
}

/// |lambda_min| of the finite-difference Hessian of u~ at b + r d, with the
/// difference step proportional to r.
template <typename Scalar>
RayProfile blowup_profile(const LegendreTransform<Scalar>& lt, const Eigen::Vector3d& direction,
                          const std::vector<double>& radii, double relative_step = 1e-2) {
  RayProfile prof{direction.normalized(), radii, {}};
  for (double r : radii) {
    const Vec3<Scalar> q = lt.singular_image() + prof.direction.template cast<Scalar>() * Scalar(r);
    const Scalar step = Scalar(relative_step * r);
    lt.check_away_from_singular(q, step);
    prof.values.push_back(std::abs(eig3(lt.fd_hessian(q, step))[0]));
  }
  return prof;
}

/// Relative gap between lambda_min of the finite-difference Hessian at
/// (0, 0, w) and 1 / u_zz at the axis preimage.
template <typename Scalar>
double axis_blowup_cross_check(const LegendreTransform<Scalar>& lt, Scalar w, double relative_step = 1e-2) {
  const Vec3<Scalar> q(0, 0, w);
  const Scalar step = std::abs(w) * Scalar(relative_step);
  const double fd = eig3(lt.fd_hessian(q, step))[0];
  const double exact = static_cast<double>(Scalar(1) / lt.gradient_map().jacobian(lt.invert(q))(2, 2));
  return std::abs(fd - exact) / std::abs(exact);
}

void write_profile_csv(std::ostream& os, const RayProfile& profile);

}  // namespace sle
