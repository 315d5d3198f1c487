#include "sle/legendre.hpp"

namespace sle {

Coeff axis_cubic_closed_form(const Coeff& c) {
  if (c == -1) return Coeff(1, 2);
  if (c == 0) return Coeff(1, 3);
  const Coeff c2 = c * c;
  return Coeff(1) / ((c + 1) * (c2 + 2 * c + 2) * (c2 + c + 1) * (c2 + 1));
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
  std::vector<Eigen::Vector3d> out;
  if (n <= 0) return out;
  if (n == 1) return {Eigen::Vector3d(0, 0, 1)};
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * i / (n - 1);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

}  // namespace sle
