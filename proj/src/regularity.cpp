#include "sle/regularity.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace sle {
namespace {

PowerFit log_log_fit(const RayProfile& profile) {
  if (profile.radii.size() != profile.values.size()) {
    throw Error(ErrorCode::kDegenerateProfile, "radii and values differ in length");
  }
  if (profile.radii.size() < 8) throw Error(ErrorCode::kDegenerateProfile, "profile needs at least 8 points");
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    const double r = profile.radii[i], v = profile.values[i];
    if (!(r > 0.0) || !(v > 0.0) || !std::isfinite(v) || !std::isfinite(std::log(v))) {
      throw Error(ErrorCode::kDegenerateProfile, "profile value underflows or is not positive");
    }
    if (i > 0 && !(r < profile.radii[i - 1])) {
      throw Error(ErrorCode::kDegenerateProfile, "radii must decrease strictly");
    }
  }
  std::vector<double> x, y;
  for (std::size_t i = 1; i + 1 < profile.radii.size(); ++i) {
    x.push_back(std::log(profile.radii[i]));
    y.push_back(std::log(profile.values[i]));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  PowerFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.constant = std::exp(intercept);
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(y[i] - intercept - fit.exponent * x[i]));
  }
  fit.n_points = static_cast<int>(x.size());
  return fit;
}

}  // namespace

std::vector<double> geometric_radii(double r0, double rho, int count) {
  if (!(rho > 0.0 && rho < 1.0) || !(r0 > 0.0)) throw Error(ErrorCode::kBadConfig, "need r0 > 0 and rho in (0, 1)");
  std::vector<double> r;
  for (int k = 0; k < count; ++k) r.push_back(r0 * std::pow(rho, k));
  return r;
}

long double axis_inverse_oracle(const Jet& u, long double w, long double radius) {
  // u_z(0, 0, z) = sum_k a_k z^k and its derivative.
  std::vector<long double> a(std::max(u.degree(), 1), 0.0L);
  for (const auto& [e, c] : u.terms()) {
    if (e.x == 0 && e.y == 0 && e.z >= 1) a[e.z - 1] = to_scalar<long double>(c * e.z);
  }
  auto f = [&](long double z) {
    long double s = 0.0L;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * z + *it;
    return s - w;
  };
  auto slope = [&](long double z) {
    long double s = 0.0L;
    for (std::size_t k = a.size(); k-- > 1;) s = s * z + a[k] * static_cast<long double>(k);
    return s;
  };
  int sign = 0;
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const long double s = slope(-radius + 2.0L * radius * i / kSamples);
    const int si = s > 0 ? 1 : (s < 0 ? -1 : 0);
    if (si == 0) continue;
    if (sign != 0 && si != sign) throw Error(ErrorCode::kNotMonotone, "axis gradient is not monotone");
    sign = si;
  }
  long double lo = -radius, hi = radius;
  const long double flo = f(lo), fhi = f(hi);
  if (sign == 0 || (flo > 0) == (fhi > 0)) {
    if (flo == 0.0L) return lo;
    if (fhi == 0.0L) return hi;
    throw Error(ErrorCode::kNotMonotone, "w is not bracketed on the axis interval");
  }
  const bool increasing = fhi > 0;
  while (hi - lo > 1e-15L) {
    const long double mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    const long double fm = f(mid);
    if (fm == 0.0L) return mid;
    if ((fm > 0) == increasing) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return (lo + hi) / 2;
}

PowerFit holder_fit(const RayProfile& profile) { return log_log_fit(profile); }

PowerFit blowup_fit(const RayProfile& profile) { return log_log_fit(profile); }

void write_profile_csv(std::ostream& os, const RayProfile& profile) {
  os << "r,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < profile.radii.size(); ++i) os << profile.radii[i] << ',' << profile.values[i] << '\n';
}

}  // namespace sle
