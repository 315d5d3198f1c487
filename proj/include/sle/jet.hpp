#pragma once

// Truncated trivariate power series with exact rational coefficients.
//
// A Jet of truncation degree N stores the coefficients of x^i y^j z^k for
// i + j + k <= N. Everything above N is treated as unknown, so products are
// truncated to the smaller of the operand degrees. Zero coefficients are
// never stored; two jets are equal iff their degrees and term maps agree.

#include <gmpxx.h>

#include <Eigen/Core>
#include <array>
#include <compare>
#include <map>
#include <string>
#include <string_view>

namespace sle {

using Coeff = mpq_class;

enum class Var { kX = 0, kY = 1, kZ = 2 };

struct Exponent {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr int total() const { return x + y + z; }
  constexpr int operator[](Var v) const {
    return v == Var::kX ? x : (v == Var::kY ? y : z);
  }
  constexpr auto operator<=>(const Exponent&) const = default;
};

constexpr Exponent operator+(Exponent a, Exponent b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }

class Jet {
 public:
  using TermMap = std::map<Exponent, Coeff>;

  Jet() = default;
  explicit Jet(int degree);

  static Jet constant(int degree, const Coeff& value);
  static Jet variable(int degree, Var v);
  static Jet monomial(int degree, Exponent e, const Coeff& value);

  int degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Coeff coeff(Exponent e) const;
  Coeff constant_term() const { return coeff({0, 0, 0}); }
  /// Sets a coefficient; terms above the truncation degree are dropped.
  void set(Exponent e, const Coeff& value);
  void add_to(Exponent e, const Coeff& value);

  Jet truncated(int degree) const;
  /// Homogeneous part of the given total degree (same truncation degree).
  Jet homogeneous_part(int total_degree) const;
  /// Largest total degree carrying a nonzero coefficient, -1 for the zero jet.
  int max_term_degree() const;
  /// Smallest total degree carrying a nonzero coefficient, -1 for the zero jet.
  int min_term_degree() const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Coeff& s);
  Jet& operator*=(const Jet& other);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, const Coeff& s) { return a *= s; }
  friend Jet operator*(const Coeff& s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a) { return a *= Coeff(-1); }

  friend bool operator==(const Jet&, const Jet&) = default;

 private:
  int degree_ = 0;
  TermMap terms_;
};

/// Formal partial derivative; the truncation degree drops by one (floor 0).
Jet diff(const Jet& a, Var v);

/// Multiplicative inverse as a truncated series. Requires a nonzero constant term.
Jet reciprocal(const Jet& a);

/// Exact evaluation: the point is converted to rationals, the sum is accumulated
/// exactly and converted to double once.
double jet_eval(const Jet& a, const Eigen::Vector3d& p);
Coeff jet_eval_exact(const Jet& a, const std::array<Coeff, 3>& p);

/// Symmetric 3x3 matrix of jets sharing one truncation degree.
struct JetSymMat3 {
  Jet a11, a22, a33, a12, a13, a23;

  const Jet& operator()(int i, int j) const;
  int degree() const { return a11.degree(); }
  /// Constant-term matrix, converted to double.
  Eigen::Matrix3d at_origin() const;
};

JetSymMat3 hessian(const Jet& u);

struct CharInvariants {
  Jet trace;
  Jet sigma2;
  Jet det;
};

CharInvariants char_invariants(const JetSymMat3& m);

/// Determinant by first-row cofactor expansion.
Jet det_cofactor(const JetSymMat3& m);
/// Determinant as the signed sum over the six permutations.
Jet det_permutation(const JetSymMat3& m);

/// Line format: header "N=<degree> vars=x,y,z", then one "i j k p/q" per term.
std::string to_text(const Jet& a);
Jet jet_from_text(std::string_view text);

}  // namespace sle
