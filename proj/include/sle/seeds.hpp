#pragma once

// Explicit degree-4 seeds for sigma2(D^2u) + c(det D^2u - tr D^2u) = 1, their
// exact residuals, and the order-by-order Cauchy-Kowalevskaya extension.

#include <string>
#include <vector>

#include "sle/jet.hpp"

namespace sle {

enum class SeedVariant { kV0, kVc, kVm1 };

std::string to_string(SeedVariant v);

struct SeedSpec {
  Coeff c;
  SeedVariant variant;

  /// Picks v0 for c = 0, vm1 for c = -1 and vc otherwise.
  static SeedSpec for_c(const Coeff& c);
};

struct SeedResult {
  Jet jet;
  /// Name of the coefficient candidate whose residual vanishes through degree 2.
  std::string adopted;
  /// Candidates tried first and rejected, with the lowest-degree residual term that survived.
  std::vector<std::string> rejected;
};

/// The seed polynomial as a jet of the given truncation degree (>= 4; the
/// polynomial itself has degree 4, so any degree >= 4 holds it exactly).
/// Throws BAD_C when the variant does not match c.
SeedResult seed_polynomial(const SeedSpec& spec, int degree = 4);

/// sigma2(D^2u) + c(det D^2u - tr D^2u) - 1, truncated to degree(u) - 2.
Jet equation_residual(const Coeff& c, const Jet& u);

/// u_xx + u_yy + c(u_xx u_yy - u_xy^2) - c, the factor multiplying u_zz.
/// Throws CHARACTERISTIC when its constant term vanishes.
Jet noncharacteristic_coefficient(const Coeff& c, const Jet& u);

/// Trace u|_{z=0} and normal derivative u_z|_{z=0}, as jets in (x, y).
struct CauchyData {
  Jet trace;
  Jet normal;
};

CauchyData cauchy_data_of(const Jet& u);

/// Unique degree-N jet with the given Cauchy data whose residual vanishes
/// through degree N - 2. Writing u = sum_k a_k(x, y) z^k, each a_{k+2} is the
/// z^k coefficient of -R(u) / D(u), where D is the noncharacteristic
/// coefficient and R collects everything in the equation not multiplying u_zz.
Jet cauchy_solve(const Coeff& c, const CauchyData& data, int degree);

}  // namespace sle
