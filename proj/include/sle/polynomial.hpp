#pragma once

#include <Eigen/Core>
#include <vector>

#include "sle/jet.hpp"

namespace sle {

/// Rational to floating point with a double-double split, so long double
/// receives its full 64-bit mantissa.
template <typename Scalar>
Scalar to_scalar(const Coeff& c) {
  mpf_class x(c, 192);
  const double hi = x.get_d();
  x -= hi;
  const double lo = x.get_d();
  return static_cast<Scalar>(hi) + static_cast<Scalar>(lo);
}

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

/// Floating-point image of a Jet, with its gradient and Hessian compiled once
/// so that value / gradient / Hessian cost one pass over the monomials each.
template <typename Scalar>
class Polynomial {
 public:
  Polynomial() = default;

  explicit Polynomial(const Jet& jet) : degree_(jet.degree()) {
    value_ = compile(jet);
    const Jet gx = diff(jet, Var::kX), gy = diff(jet, Var::kY), gz = diff(jet, Var::kZ);
    grad_ = {compile(gx), compile(gy), compile(gz)};
    const Jet* g[3] = {&gx, &gy, &gz};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) hess_[index(i, j)] = compile(diff(*g[i], static_cast<Var>(j)));
  }

  int degree() const { return degree_; }

  Scalar value(const Vec3<Scalar>& p) const {
    Powers pw(p, degree_);
    return sum(value_, pw);
  }

  Vec3<Scalar> gradient(const Vec3<Scalar>& p) const {
    Powers pw(p, degree_);
    return {sum(grad_[0], pw), sum(grad_[1], pw), sum(grad_[2], pw)};
  }

  Mat3<Scalar> hessian(const Vec3<Scalar>& p) const {
    Powers pw(p, degree_);
    Mat3<Scalar> h;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) h(i, j) = h(j, i) = sum(hess_[index(i, j)], pw);
    return h;
  }

  /// Gradient and Hessian from one set of powers.
  void gradient_hessian(const Vec3<Scalar>& p, Vec3<Scalar>& g, Mat3<Scalar>& h) const {
    Powers pw(p, degree_);
    for (int i = 0; i < 3; ++i) g(i) = sum(grad_[i], pw);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) h(i, j) = h(j, i) = sum(hess_[index(i, j)], pw);
  }

 private:
  struct Term {
    int i, j, k;
    Scalar c;
  };
  using Terms = std::vector<Term>;

  struct Powers {
    static constexpr int kMax = 64;
    Scalar x[kMax], y[kMax], z[kMax];
    Powers(const Vec3<Scalar>& p, int n) {
      x[0] = y[0] = z[0] = Scalar(1);
      for (int k = 1; k <= n && k < kMax; ++k) {
        x[k] = x[k - 1] * p(0);
        y[k] = y[k - 1] * p(1);
        z[k] = z[k - 1] * p(2);
      }
    }
  };

  static int index(int i, int j) { return i == j ? i : 2 + i + j; }

  static Terms compile(const Jet& jet) {
    Terms out;
    out.reserve(jet.terms().size());
    for (const auto& [e, c] : jet.terms()) {
      out.push_back({e.x, e.y, e.z, to_scalar<Scalar>(c)});
    }
    return out;
  }

  static Scalar sum(const Terms& terms, const Powers& pw) {
    Scalar s(0);
    for (const auto& t : terms) s += t.c * pw.x[t.i] * pw.y[t.j] * pw.z[t.k];
    return s;
  }

  int degree_ = 0;
  Terms value_;
  std::array<Terms, 3> grad_;
  std::array<Terms, 6> hess_;
};

}  // namespace sle
