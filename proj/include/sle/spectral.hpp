#pragma once

// Eigenvalue-space view of F_h(A) = det A - tr A + h sigma2(A) - h.
//
// The authoritative description of the three solution components is the
// arctan sum: arctan l1 + arctan l2 + arctan l3 = theta_i with
// theta_i = -atan(h) + (i - 2) pi. Labels follow theta ordering, so label 1 is
// the concave component, label 2 the middle one and label 3 the convex one.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <iosfwd>
#include <numbers>
#include <vector>

#include "sle/error.hpp"

namespace sle {

/// Sorted eigenvalue triple l1 <= l2 <= l3.
class SpecTriple {
 public:
  SpecTriple() = default;
  SpecTriple(double a, double b, double c) : lam_{a, b, c} { std::sort(lam_.begin(), lam_.end()); }

  double operator[](int i) const { return lam_[i]; }
  const std::array<double, 3>& values() const { return lam_; }
  /// Triple of the negated matrix (-l3, -l2, -l1).
  SpecTriple negated() const { return {-lam_[2], -lam_[1], -lam_[0]}; }

 private:
  std::array<double, 3> lam_{};
};

enum class Branch { kC1 = 1, kC2 = 2, kC3 = 3 };

struct Convention {
  double h = 0.0;

  /// theta_i for i = 1, 2, 3.
  double theta_branch(int i) const { return -std::atan(h) + (i - 2) * std::numbers::pi; }
  double theta(Branch b) const { return theta_branch(static_cast<int>(b)); }
};

namespace detail {

template <typename Scalar>
void check_symmetric(const Eigen::Matrix<Scalar, 3, 3>& m) {
  using std::abs;
  const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
  const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= Scalar(1e-12) * scale)) {
    throw Error(ErrorCode::kAsymmetricInput, "matrix is not symmetric");
  }
}

}  // namespace detail

/// Sorted eigenvalues of a symmetric 3x3 matrix. Trigonometric closed form,
/// with Eigen's iterative solver when the closed form is ill-conditioned
/// (nearly repeated eigenvalues).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> eigenvalues3(const Eigen::Matrix<Scalar, 3, 3>& input) {
  using std::acos;
  using std::cos;
  using std::sqrt;
  detail::check_symmetric(input);
  const Eigen::Matrix<Scalar, 3, 3> a = (input + input.transpose()) / Scalar(2);

  const Scalar p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const Scalar q = a.trace() / Scalar(3);
  const Scalar d0 = a(0, 0) - q, d1 = a(1, 1) - q, d2 = a(2, 2) - q;
  const Scalar p2 = d0 * d0 + d1 * d1 + d2 * d2 + Scalar(2) * p1;
  const Scalar p = sqrt(p2 / Scalar(6));
  const Scalar scale = std::max<Scalar>(Scalar(1), a.cwiseAbs().maxCoeff());

  Eigen::Matrix<Scalar, 3, 1> out;
  bool closed_form_ok = p > Scalar(1e-6) * scale;
  if (closed_form_ok) {
    const Eigen::Matrix<Scalar, 3, 3> b = (a - q * Eigen::Matrix<Scalar, 3, 3>::Identity()) / p;
    const Scalar r = b.determinant() / Scalar(2);
    // acos loses half the digits near |r| = 1 (a double eigenvalue).
    closed_form_ok = std::abs(r) < Scalar(1) - Scalar(1e-4);
    if (closed_form_ok) {
      const Scalar phi = acos(r) / Scalar(3);
      const Scalar two_pi_3 = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(3);
      const Scalar e_hi = q + Scalar(2) * p * cos(phi);
      const Scalar e_lo = q + Scalar(2) * p * cos(phi + two_pi_3);
      out << e_lo, Scalar(3) * q - e_hi - e_lo, e_hi;
    }
  }
  if (!closed_form_ok) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 3, 3>> solver(a, Eigen::EigenvaluesOnly);
    out = solver.eigenvalues();
  }
  std::sort(out.data(), out.data() + 3);
  return out;
}

template <typename Scalar>
SpecTriple eig3(const Eigen::Matrix<Scalar, 3, 3>& m) {
  const auto ev = eigenvalues3(m);
  return {static_cast<double>(ev(0)), static_cast<double>(ev(1)), static_cast<double>(ev(2))};
}

double arctan_sum(const SpecTriple& s);

/// Third eigenvalue on the surface F_h = 0 given the first two:
/// l3 = (h(1 - l1 l2) + l1 + l2) / (l1 l2 - 1 + h(l1 + l2)).
double lambda3_graph(double l1, double l2, const Convention& conv);

/// Index of the nearest theta_branch; NOT_ON_SURFACE when farther than 1e-8.
Branch classify_branch(const SpecTriple& s, const Convention& conv);

/// Component predicted by the polynomial sign conditions on (l1, l2)
/// (sign of l1 l2 - 1 + h(l1 + l2) and position of l1, l2 relative to -h).
/// Used only to cross-check classify_branch.
Branch branch_by_sign_conditions(double l1, double l2, const Convention& conv);

struct GraphHessian {
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;
  double det2 = 0.0;
};

/// Second derivatives of lambda3_graph with respect to (l1, l2), closed form.
GraphHessian lambda3_graph_hessian(double l1, double l2, const Convention& conv);

/// Membership in F^i = {sum >= theta_i} or its dual F~^i = {sum >= -theta_i}.
bool dual_membership(const SpecTriple& s, const Convention& conv, int branch, bool dual);

/// min_i 1 / (l_i^2 + 1): the smallest derivative of the arctan sum.
double ellipticity_gap(const SpecTriple& s);

struct ClassifiedSample {
  double l1, l2, l3, sum;
  Branch branch;
};

/// CSV "l1,l2,l3,sum,branch".
void write_classification_csv(std::ostream& os, const std::vector<ClassifiedSample>& samples);

}  // namespace sle
