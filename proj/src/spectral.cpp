#include "sle/spectral.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace sle {
namespace {

constexpr double kAsymptoteTol = 1e-12;
constexpr double kSurfaceTol = 1e-8;

double graph_denominator(double l1, double l2, double h) { return l1 * l2 - 1.0 + h * (l1 + l2); }

}  // namespace

double arctan_sum(const SpecTriple& s) { return std::atan(s[0]) + std::atan(s[1]) + std::atan(s[2]); }

double lambda3_graph(double l1, double l2, const Convention& conv) {
  const double den = graph_denominator(l1, l2, conv.h);
  if (std::abs(den) < kAsymptoteTol) throw Error(ErrorCode::kOnAsymptote, "l1 l2 - 1 + h(l1 + l2) = 0");
  return (conv.h * (1.0 - l1 * l2) + l1 + l2) / den;
}

Branch classify_branch(const SpecTriple& s, const Convention& conv) {
  const double sum = arctan_sum(s);
  int best = 1;
  double best_dist = std::abs(sum - conv.theta_branch(1));
  for (int i = 2; i <= 3; ++i) {
    const double d = std::abs(sum - conv.theta_branch(i));
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  if (!(best_dist < kSurfaceTol)) {
    throw Error(ErrorCode::kNotOnSurface, "arctan sum is not on any branch of F_h = 0");
  }
  return static_cast<Branch>(best);
}

Branch branch_by_sign_conditions(double l1, double l2, const Convention& conv) {
  const double den = graph_denominator(l1, l2, conv.h);
  if (den < 0.0) return Branch::kC2;
  // den > 0 forces l1 + h and l2 + h to share a sign: (l1 + h)(l2 + h) = den + 1 + h^2.
  return l1 > -conv.h ? Branch::kC3 : Branch::kC1;
}

GraphHessian lambda3_graph_hessian(double l1, double l2, const Convention& conv) {
  const double c = conv.h;
  const double den = graph_denominator(l1, l2, c);
  if (std::abs(den) < kAsymptoteTol) throw Error(ErrorCode::kOnAsymptote, "l1 l2 - 1 + h(l1 + l2) = 0");
  const double k = 1.0 + c * c;
  const double den3 = den * den * den;
  GraphHessian g;
  g.d11 = 2.0 * (l2 + c) * (l2 * l2 + 1.0) * k / den3;
  g.d22 = 2.0 * (l1 + c) * (l1 * l1 + 1.0) * k / den3;
  g.d12 = 2.0 * k * (l1 + l2 + c - l1 * l2 * c) / den3;
  g.det2 = 4.0 * k * k * (c * l1 + c * l2 + l1 * l1 * l2 * l2 + l1 * l2 + l2 * l2 + l1 * l1) /
           (den3 * den * den);
  return g;
}

bool dual_membership(const SpecTriple& s, const Convention& conv, int branch, bool dual) {
  if (branch < 1 || branch > 3) throw Error(ErrorCode::kBadConfig, "branch must be 1, 2 or 3");
  const double theta = conv.theta_branch(branch);
  const double threshold = dual ? -theta : theta;
  return arctan_sum(s) >= threshold;
}

double ellipticity_gap(const SpecTriple& s) {
  double gap = 1.0;
  for (double l : s.values()) gap = std::min(gap, 1.0 / (l * l + 1.0));
  return gap;
}

void write_classification_csv(std::ostream& os, const std::vector<ClassifiedSample>& samples) {
  os << "l1,l2,l3,sum,branch\n";
  os << std::setprecision(17);
  for (const auto& s : samples) {
    os << s.l1 << ',' << s.l2 << ',' << s.l3 << ',' << s.sum << ',' << static_cast<int>(s.branch) << '\n';
  }
}

}  // namespace sle
