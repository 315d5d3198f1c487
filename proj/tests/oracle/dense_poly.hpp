#pragma once

// Test-only dense polynomial arithmetic over the rationals. It shares no code
// with sle::Jet and serves as the independent route for symbolic checks.

#include <gmpxx.h>

#include <array>
#include <map>
#include <vector>

namespace oracle {

class DensePoly {
 public:
  explicit DensePoly(int max_degree = 0)
      : n_(max_degree), c_((n_ + 1) * (n_ + 1) * (n_ + 1)) {}

  int max_degree() const { return n_; }
  mpq_class& at(int i, int j, int k) { return c_[idx(i, j, k)]; }
  const mpq_class& at(int i, int j, int k) const { return c_[idx(i, j, k)]; }

  DensePoly operator+(const DensePoly& o) const {
    DensePoly r(n_);
    for (std::size_t t = 0; t < c_.size(); ++t) r.c_[t] = c_[t] + o.c_[t];
    return r;
  }
  DensePoly operator-(const DensePoly& o) const {
    DensePoly r(n_);
    for (std::size_t t = 0; t < c_.size(); ++t) r.c_[t] = c_[t] - o.c_[t];
    return r;
  }
  DensePoly scaled(const mpq_class& s) const {
    DensePoly r(n_);
    for (std::size_t t = 0; t < c_.size(); ++t) r.c_[t] = c_[t] * s;
    return r;
  }
  // Full product, terms with any exponent above max_degree are discarded;
  // callers size max_degree large enough for the products they form.
  DensePoly operator*(const DensePoly& o) const {
    DensePoly r(n_);
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j)
        for (int k = 0; k <= n_; ++k) {
          if (at(i, j, k) == 0) continue;
          for (int a = 0; a + i <= n_; ++a)
            for (int b = 0; b + j <= n_; ++b)
              for (int c = 0; c + k <= n_; ++c) {
                if (o.at(a, b, c) == 0) continue;
                r.at(i + a, j + b, k + c) += at(i, j, k) * o.at(a, b, c);
              }
        }
    return r;
  }
  DensePoly derivative(int var) const {
    DensePoly r(n_);
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j)
        for (int k = 0; k <= n_; ++k) {
          const int e[3] = {i, j, k};
          if (e[var] == 0) continue;
          int d[3] = {i, j, k};
          --d[var];
          r.at(d[0], d[1], d[2]) = at(i, j, k) * e[var];
        }
    return r;
  }
  /// Coefficients grouped by total degree: (i, j, k) -> value, nonzero only.
  std::map<std::array<int, 3>, mpq_class> terms_of_degree(int total) const {
    std::map<std::array<int, 3>, mpq_class> out;
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j)
        for (int k = 0; k <= n_; ++k)
          if (i + j + k == total && at(i, j, k) != 0) out[{i, j, k}] = at(i, j, k);
    return out;
  }
  bool vanishes_through(int total) const {
    for (int d = 0; d <= total; ++d)
      if (!terms_of_degree(d).empty()) return false;
    return true;
  }

 private:
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * (n_ + 1) + j) * (n_ + 1) + k;
  }
  int n_;
  std::vector<mpq_class> c_;
};

/// sigma2 + c (det - tr) - 1 of the Hessian, computed by Leibniz expansion.
inline DensePoly residual(const mpq_class& c, const DensePoly& u) {
  DensePoly h[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = u.derivative(i).derivative(j);
  DensePoly s2 = h[0][0] * h[1][1] + h[0][0] * h[2][2] + h[1][1] * h[2][2] - h[0][1] * h[0][1] -
                 h[0][2] * h[0][2] - h[1][2] * h[1][2];
  DensePoly det = h[0][0] * h[1][1] * h[2][2] + h[0][1] * h[1][2] * h[2][0] +
                  h[0][2] * h[1][0] * h[2][1] - h[0][2] * h[1][1] * h[2][0] -
                  h[0][0] * h[1][2] * h[2][1] - h[0][1] * h[1][0] * h[2][2];
  DensePoly tr = h[0][0] + h[1][1] + h[2][2];
  DensePoly r = s2 + (det - tr).scaled(c);
  r.at(0, 0, 0) -= 1;
  return r;
}

}  // namespace oracle
