#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sle/legendre.hpp"
#include "sle/seeds.hpp"
#include "test_support.hpp"

namespace sle {
namespace {

using test::frac;
using test::poly;
using LD = long double;
using V = Vec3<LD>;
using M = Mat3<LD>;
using VecList = std::vector<V, Eigen::aligned_allocator<V>>;

Jet identity_quadratic() { return poly(2, {{2, 0, 0, 1, 2}, {0, 2, 0, 1, 2}, {0, 0, 2, 1, 2}}); }

Jet solved_jet(const Coeff& c, int degree) {
  const Jet seed = seed_polynomial(SeedSpec::for_c(c)).jet;
  return cauchy_solve(c, cauchy_data_of(seed), degree);
}

const LegendreTransform<LD>& v0_transform() {
  static const LegendreTransform<LD> lt(test::v0_seed());
  return lt;
}

const LegendreTransform<LD>& solved_transform(int which) {
  static const LegendreTransform<LD> c0(solved_jet(0, 12));
  static const LegendreTransform<LD> c1(solved_jet(1, 12));
  return which == 0 ? c0 : c1;
}

TEST(GradientMap, AxisCubicOfSeeds) {
  EXPECT_EQ(GradientMap<LD>(test::v0_seed()).axis_cubic(), frac(1, 3));
  EXPECT_EQ(GradientMap<LD>(identity_quadratic()).axis_cubic(), 0);
  // +z^4/2 gives u_z = +2z^3, so m = -1/2: magnitude matches, sign does not.
  const Coeff m_vm1 = GradientMap<LD>(seed_polynomial(SeedSpec::for_c(-1)).jet).axis_cubic();
  EXPECT_EQ(m_vm1, frac(-1, 2));
  EXPECT_EQ(abs(m_vm1), axis_cubic_closed_form(-1));
  EXPECT_NEAR(static_cast<double>(GradientMap<LD>(test::v0_seed()).axis_component(0.1L)), -4.0 / 3.0 * 1e-3, 1e-18);
}

TEST(GradientMap, AxisCubicMatchesClosedFormOverBattery) {
  for (const Coeff c : {frac(-3), frac(-2), frac(-1, 2), frac(0), frac(1, 2), frac(1), frac(2), frac(3)}) {
    const GradientMap<LD> g(solved_jet(c, 6));
    EXPECT_EQ(abs(g.axis_cubic()), abs(axis_cubic_closed_form(c))) << c;
    EXPECT_TRUE(g.axis_invariant()) << c;
  }
  EXPECT_EQ(axis_cubic_closed_form(frac(-2)), frac(-1, 30));
  EXPECT_EQ(axis_cubic_closed_form(frac(1)), frac(1, 2 * 5 * 3 * 2));
}

TEST(GradientMap, ComponentsAreDerivatives) {
  const Jet u = test::v0_seed();
  const GradientMap<LD> g(u);
  EXPECT_EQ(g.components()[0], diff(u, Var::kX));
  EXPECT_EQ(g.components()[2], diff(u, Var::kZ));
  EXPECT_THROW(GradientMap<LD>(Jet(1)), Error);
}

TEST(Invert, AxisPointOfSeed) {
  const V p = v0_transform().invert(V(0, 0, -4.0L / 3.0L * 1e-3L));
  EXPECT_NEAR(static_cast<double>(p(0)), 0.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(p(1)), 0.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(p(2)), 0.1, 1e-14);
}

TEST(Invert, IdentityGradient) {
  const LegendreTransform<LD> lt(identity_quadratic());
  for (const V& q : {V(0.01L, -0.02L, 0.03L), V(0, 0, 0.05L), V(-0.07L, 0, 0)}) {
    EXPECT_LT((lt.invert(q) - q).norm(), 1e-15L);
  }
}

TEST(Invert, RoundTripExample) {
  const V p(0.02L, 0.03L, 0.05L);
  const V q = v0_transform().gradient_map()(p);
  EXPECT_LT((v0_transform().invert(q) - p).norm(), 1e-10L);
}

TEST(Invert, RoundTripOnShell) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.01, 0.1);
  for (int which : {0, 1}) {
    const auto& lt = solved_transform(which);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      V d(normal(rng), normal(rng), normal(rng));
      const V p = d.normalized() * LD(radius(rng));
      const V back = lt.invert(lt.gradient_map()(p));
      worst = std::max(worst, static_cast<double>((back - p).norm()));
    }
    EXPECT_LT(worst, 1e-10) << "c index " << which;
  }
}

TEST(Invert, NearAxisPoints) {
  const auto& lt = solved_transform(0);
  for (LD off : {1e-12L, 1e-9L, 1e-6L}) {
    const V p(off, -off / 2, 0.03L);
    EXPECT_LT((lt.invert(lt.gradient_map()(p)) - p).norm(), 1e-10L) << static_cast<double>(off);
  }
}

TEST(Invert, OutsideImage) {
  // w far beyond u_z(0, 0, -0.1) cannot be reached inside the ball.
  const InversionResult<LD> r = v0_transform().try_invert(V(0, 0, 1.0L));
  EXPECT_FALSE(r.converged && r.in_domain);
  EXPECT_THROW(v0_transform().invert(V(0, 0, 1.0L)), Error);
  try {
    v0_transform().invert(V(0.5L, 0.0L, 0.0L));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kOutOfDomain || e.code() == ErrorCode::kNoConvergence);
  }
}

TEST(LegendreValue, PositiveQuadratic) {
  const LegendreTransform<LD> lt(poly(2, {{2, 0, 0, 3, 2}, {0, 2, 0, 1, 1}, {0, 0, 2, 5, 2}}));
  const V q(0.02L, -0.01L, 0.04L);
  const LD expect = q(0) * q(0) / 6 + q(1) * q(1) / 4 + q(2) * q(2) / 10;
  EXPECT_NEAR(static_cast<double>(lt.value(q)), static_cast<double>(expect), 1e-17);
}

TEST(LegendreValue, SeedAxis) {
  EXPECT_NEAR(static_cast<double>(v0_transform().value(V(0, 0, -4.0L / 3.0L * 1e-3L))), -1e-4, 1e-16);
  EXPECT_EQ(v0_transform().value(V::Zero()), 0.0L);
}

TEST(LegendreValue, GradientOfConjugateIsPreimage) {
  const auto& lt = solved_transform(0);
  const V p(0.03L, -0.02L, 0.04L);
  const V q = lt.gradient_map()(p);
  const LD h = 1e-7L;
  V grad;
  for (int i = 0; i < 3; ++i) {
    V e = V::Zero();
    e(i) = h;
    grad(i) = (lt.value(q + e) - lt.value(q - e)) / (2 * h);
  }
  EXPECT_LT((grad - p).norm(), 1e-8L);
}

TEST(HessianDefect, Identity) {
  const LegendreTransform<LD> lt(identity_quadratic());
  EXPECT_LT(lt.hessian_inverse_defect(V(0.02L, 0.01L, -0.03L), 1e-4L), 1e-8L);
}

TEST(HessianDefect, SeedAxisHessian) {
  // p sits on the default ball's boundary, so the stencil needs a larger ball.
  const LegendreTransform<LD> lt(test::v0_seed(), {.radius = 0.2L});
  const V p(0, 0, 0.1L);
  const M h = lt.gradient_map().jacobian(p);
  EXPECT_NEAR(static_cast<double>(h(0, 0)), 0.74, 1e-12);
  EXPECT_NEAR(static_cast<double>(h(1, 1)), 1.50, 1e-12);
  EXPECT_NEAR(static_cast<double>(h(2, 2)), -0.04, 1e-12);
  const M ht = lt.fd_hessian(lt.gradient_map()(p), 1e-6L);
  const double expect[3] = {1.0 / 0.74, 1.0 / 1.5, -25.0};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(static_cast<double>(ht(i, i)) / expect[i], 1.0, 1e-3) << i;
  EXPECT_NEAR(expect[0], 1.3514, 1e-4);
}

TEST(HessianDefect, RefusesNearSingularImage) {
  try {
    v0_transform().hessian_inverse_defect(V(0, 0, -1e-7L), 1e-6L);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNearSingularImage);
  }
}

TEST(HessianDefect, SmallOnAnnulus) {
  const auto& lt = solved_transform(0);
  const VecList qs = annulus_images(lt.gradient_map(), 25, 0.025L, 0.05L, 5);
  for (const V& q : qs) EXPECT_LT(lt.hessian_inverse_defect(q, 1e-6L), 1e-6L);
}

TEST(Injectivity, Identity) {
  const InjectivityReport r = injectivity_scan(GradientMap<LD>(identity_quadratic()), 2000, 0.1L);
  EXPECT_EQ(r.collisions, 0);
  EXPECT_GT(r.min_ratio, 1.0);
}

TEST(Injectivity, SeedHasNoCollisions) {
  const InjectivityReport r = injectivity_scan(GradientMap<LD>(test::v0_seed()), 100000, 0.1L);
  EXPECT_EQ(r.collisions, 0);
  EXPECT_GT(r.pairs, 90000);
}

TEST(Injectivity, EvenPotentialCollides) {
  const InjectivityReport r = injectivity_scan(GradientMap<LD>(poly(3, {{2, 1, 0, 1}})), 2000, 0.1L);
  EXPECT_GT(r.collisions, 0);
}

TEST(BranchConstant, SigmaTwoTransformsToMiddleBranch) {
  const auto& lt = solved_transform(0);
  const VecList qs = annulus_images(lt.gradient_map(), 100, 0.025L, 0.05L, 7);
  const BranchReport rep = transform_branch_constant(lt, qs, 1e-6L);
  EXPECT_NEAR(rep.theta_mean, 0.0, 1e-5);
  EXPECT_LT(rep.spread, 1e-5);
}

TEST(BranchConstant, CEqualsOne) {
  const auto& lt = solved_transform(1);
  const VecList qs = annulus_images(lt.gradient_map(), 100, 0.025L, 0.05L, 9);
  const BranchReport rep = transform_branch_constant(lt, qs, 1e-7L);
  EXPECT_LT(rep.spread, 1e-5);
  EXPECT_NEAR(rep.theta_mean, -std::atan(1.0), 1e-5);
  EXPECT_TRUE(rep.signature_uniform);
  // Two positive eigenvalues and one negative.
  EXPECT_EQ(rep.signatures.front(), (std::array<int, 3>{-1, 1, 1}));
}

TEST(BranchConstant, ConvexQuadratic) {
  const LegendreTransform<LD> lt(poly(2, {{2, 0, 0, 1}, {0, 2, 0, 2}, {0, 0, 2, 3}}));
  const VecList qs = {V(0.01L, 0, 0), V(0, 0.02L, 0.01L), V(-0.03L, 0.01L, 0.02L)};
  const BranchReport rep = transform_branch_constant(lt, qs, 1e-4L);
  EXPECT_NEAR(rep.theta_mean, std::atan(0.5) + std::atan(0.25) + std::atan(1.0 / 6.0), 1e-9);
  EXPECT_LT(rep.spread, 1e-9);
}

TEST(BoundaryTrace, IdentityIsConstant) {
  const LegendreTransform<LD> lt(identity_quadratic(), {.radius = 0.2L});
  const BoundaryTrace<LD> t = boundary_trace(lt, 0.1L, 50);
  ASSERT_EQ(t.values.size(), 50u);
  for (LD v : t.values) EXPECT_NEAR(static_cast<double>(v), 0.005, 1e-15);
}

TEST(BoundaryTrace, SeedAxisAndParity) {
  const BoundaryTrace<LD> t = boundary_trace(v0_transform(), 4.0L / 3.0L * 1e-3L, 2);
  ASSERT_EQ(t.values.size(), 2u);
  EXPECT_EQ(t.directions[0], Eigen::Vector3d(0, 0, 1));
  EXPECT_NEAR(static_cast<double>(t.values[0]), -1e-4, 1e-15);
  EXPECT_NEAR(static_cast<double>(t.values[1]), static_cast<double>(t.values[0]), 1e-15);
}

TEST(BoundaryTrace, SphereTooBig) {
  try {
    boundary_trace(v0_transform(), 0.5L, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kSphereTooBig || e.code() == ErrorCode::kNoConvergence);
  }
}

TEST(BoundaryTrace, FibonacciDirections) {
  const auto d = fibonacci_sphere(100);
  ASSERT_EQ(d.size(), 100u);
  for (const auto& v : d) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  EXPECT_EQ(d.front().z(), 1.0);
  EXPECT_EQ(d.back().z(), -1.0);
}

TEST(Export, CsvHeaders) {
  std::ostringstream a, b;
  write_samples_csv<LD>(a, {{V(1, 2, 3), V(4, 5, 6), 7, 8}});
  EXPECT_EQ(a.str(), "qu,qv,qw,px,py,pz,value,defect\n1,2,3,4,5,6,7,8\n");
  write_trace_csv<LD>(b, {0.1L, {Eigen::Vector3d(0, 0, 1)}, {0.5L}});
  EXPECT_EQ(b.str(), "dx,dy,dz,value\n0,0,1,0.5\n");
}

}  // namespace
}  // namespace sle
