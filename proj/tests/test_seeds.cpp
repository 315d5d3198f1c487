#include <gtest/gtest.h>

#include <chrono>

#include "sle/error.hpp"
#include "sle/seeds.hpp"
#include "sle/spectral.hpp"
#include "test_support.hpp"

namespace sle {
namespace {

using test::frac;
using test::poly;

std::vector<Coeff> battery() {
  return {frac(-3), frac(-2), frac(-1), frac(-1, 2), frac(0), frac(1, 2), frac(1), frac(2), frac(3)};
}

TEST(SeedPolynomial, PrintedCoefficients) {
  const Jet v0 = seed_polynomial(SeedSpec::for_c(0)).jet;
  EXPECT_EQ(v0.coeff({0, 4, 0}), frac(-1, 3));
  EXPECT_EQ(v0.coeff({0, 2, 2}), 5);
  EXPECT_EQ(v0.coeff({2, 0, 1}), -2);
  EXPECT_EQ(v0, test::v0_seed());

  const Jet vm1 = seed_polynomial(SeedSpec::for_c(-1)).jet;
  EXPECT_EQ(vm1.coeff({0, 0, 4}), frac(1, 2));
  EXPECT_EQ(vm1.coeff({0, 2, 0}), frac(-1, 6));
  EXPECT_EQ(vm1.coeff({4, 0, 0}), frac(-119, 2));
}

TEST(SeedPolynomial, VcQuadraticPartAtCEqualsOne) {
  const Jet v1 = seed_polynomial(SeedSpec::for_c(1)).jet;
  EXPECT_EQ(v1.homogeneous_part(2), poly(4, {{0, 2, 0, 3, 2}, {2, 0, 0, 1}}));
  EXPECT_EQ(hessian(v1).at_origin(), Eigen::Vector3d(2, 3, 0).asDiagonal().toDenseMatrix());
}

TEST(SeedPolynomial, VariantMismatchIsBadC) {
  EXPECT_THROW(seed_polynomial({frac(-1), SeedVariant::kVc}), Error);
  EXPECT_THROW(seed_polynomial({frac(0), SeedVariant::kVc}), Error);
  EXPECT_THROW(seed_polynomial({frac(1), SeedVariant::kV0}), Error);
  EXPECT_THROW(seed_polynomial({frac(2), SeedVariant::kVm1}), Error);
  try {
    seed_polynomial({frac(-1), SeedVariant::kVc});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadC);
  }
}

TEST(SeedPolynomial, QuarticCandidateResolution) {
  const SeedResult r = seed_polynomial(SeedSpec::for_c(2));
  EXPECT_EQ(r.adopted, "cauchy-display (x4,y4 over 3)");
  ASSERT_EQ(r.rejected.size(), 2u);
  EXPECT_NE(r.rejected[0].find("printed-polynomial"), std::string::npos);
  // The printed polynomial leaves a degree-2 residual, which is what rejected it.
  EXPECT_NE(r.rejected[0].find("degree 2"), std::string::npos);
}

TEST(EquationResidual, QuadraticWithOriginEigenvalues) {
  for (const Coeff& c : battery()) {
    const Jet q = poly(4, {}) + Jet::monomial(4, {2, 0, 0}, Coeff((c + 1) / 2)) +
                  Jet::monomial(4, {0, 2, 0}, Coeff((c * c + c + 1) / 2));
    EXPECT_TRUE(equation_residual(c, q).is_zero()) << c;
  }
}

TEST(EquationResidual, V0LowDegreesVanishAndCubicTerms) {
  const Jet r = equation_residual(0, test::v0_seed(8));
  EXPECT_EQ(r.min_term_degree(), 3);
  EXPECT_EQ(r.coeff({0, 0, 3}), 16);
  EXPECT_EQ(r.coeff({0, 2, 1}), -144);
  // Computed value; the printed display has 4 * 4 = 16 here.
  EXPECT_EQ(r.coeff({2, 0, 1}), 176);
  EXPECT_EQ(equation_residual(0, test::v0_seed(4)).degree(), 2);
  EXPECT_TRUE(equation_residual(0, test::v0_seed(4)).is_zero());
}

TEST(EquationResidual, IdentityQuadratic) {
  const Jet u = poly(4, {{2, 0, 0, 1, 2}, {0, 2, 0, 1, 2}, {0, 0, 2, 1, 2}});
  EXPECT_EQ(equation_residual(0, u), Jet::constant(2, 2));
}

TEST(EquationResidual, MatchesDenseOracleOnBattery) {
  for (const Coeff& c : battery()) {
    const Jet seed = seed_polynomial(SeedSpec::for_c(c), 8).jet;
    const Jet r = equation_residual(c, seed);
    const auto dr = oracle::residual(c, test::dense(seed, 8));
    EXPECT_TRUE(dr.vanishes_through(2)) << c;
    for (int d = 0; d <= 6; ++d)
      for (const auto& [e, v] : dr.terms_of_degree(d)) EXPECT_EQ(r.coeff({e[0], e[1], e[2]}), v) << c;
    EXPECT_EQ(r.max_term_degree(), dr.terms_of_degree(6).empty() ? r.max_term_degree() : 6);
  }
}

TEST(EquationResidual, SeedBatteryIsExactlyZeroThroughDegreeTwo) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const Coeff& c : battery()) {
    const Jet r = equation_residual(c, seed_polynomial(SeedSpec::for_c(c)).jet);
    EXPECT_TRUE(r.is_zero()) << "c = " << c;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(NoncharacteristicCoefficient, Examples) {
  EXPECT_EQ(noncharacteristic_coefficient(0, test::v0_seed()).constant_term(), 2);
  EXPECT_EQ(noncharacteristic_coefficient(1, seed_polynomial(SeedSpec::for_c(1)).jet).constant_term(), 10);
  const Jet flat = poly(4, {{0, 0, 2, 1}, {1, 0, 1, 1}});
  try {
    noncharacteristic_coefficient(0, flat);
    FAIL() << "expected CHARACTERISTIC";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCharacteristic);
  }
}

TEST(CauchySolve, ReproducesV0AtDegreeFour) {
  EXPECT_EQ(cauchy_solve(0, cauchy_data_of(test::v0_seed()), 4), test::v0_seed());
}

TEST(CauchySolve, CauchyDataOfV0) {
  const CauchyData d = cauchy_data_of(test::v0_seed());
  EXPECT_EQ(d.trace, poly(4, {{0, 4, 0, -1, 3}, {4, 0, 0, -1}, {0, 2, 0, 1, 2}, {2, 0, 0, 1, 2}}));
  EXPECT_EQ(d.normal, poly(3, {{0, 2, 0, 2}, {2, 0, 0, -2}}));
}

TEST(CauchySolve, DegreeEightResidualVanishesThroughSix) {
  const Jet u = cauchy_solve(0, cauchy_data_of(test::v0_seed()), 8);
  EXPECT_EQ(u.degree(), 8);
  EXPECT_TRUE(equation_residual(0, u).is_zero());
  EXPECT_EQ(u.truncated(4), test::v0_seed());
  // The dense oracle confirms the vanishing independently.
  EXPECT_TRUE(oracle::residual(0, test::dense(u, 8)).vanishes_through(6));
}

TEST(CauchySolve, SimpleData) {
  for (const Coeff& c : {frac(0), frac(1, 2)}) {
    CauchyData d{poly(4, {{2, 0, 0, 1, 2}, {0, 2, 0, 1, 2}}), Jet(3)};
    const Jet u = cauchy_solve(c, d, 6);
    EXPECT_EQ(equation_residual(c, u).constant_term(), 0);
    EXPECT_TRUE(equation_residual(c, u).is_zero());
  }
}

TEST(CauchySolve, Errors) {
  CauchyData flat{poly(4, {{1, 1, 0, 1}}), Jet(3)};
  EXPECT_THROW(cauchy_solve(0, flat, 6), Error);
  EXPECT_THROW(cauchy_solve(0, cauchy_data_of(test::v0_seed()), 3), Error);
}

TEST(CauchySolve, StableUnderDegreeIncrease) {
  for (const Coeff& c : {frac(0), frac(1), frac(-2)}) {
    const CauchyData d = cauchy_data_of(seed_polynomial(SeedSpec::for_c(c)).jet);
    const Jet u6 = cauchy_solve(c, d, 6);
    const Jet u8 = cauchy_solve(c, d, 8);
    EXPECT_EQ(u8.truncated(6), u6) << c;
    EXPECT_EQ(cauchy_solve(c, d, 6), u6);
  }
}

TEST(CauchySolve, BatteryReproducesSeeds) {
  for (const Coeff& c : battery()) {
    const Jet seed = seed_polynomial(SeedSpec::for_c(c)).jet;
    const Jet u = cauchy_solve(c, cauchy_data_of(seed), 8);
    EXPECT_EQ(u.truncated(4), seed) << c;
    EXPECT_TRUE(equation_residual(c, u).is_zero()) << c;
  }
}

TEST(SeedEigenvalues, OriginMultisets) {
  auto origin_eigs = [](const Coeff& c) { return eig3(hessian(seed_polynomial(SeedSpec::for_c(c)).jet).at_origin()); };
  const SpecTriple s0 = origin_eigs(0);
  EXPECT_NEAR(s0[0], 0, 1e-12);
  EXPECT_NEAR(s0[1], 1, 1e-12);
  EXPECT_NEAR(s0[2], 1, 1e-12);
  const SpecTriple sm1 = origin_eigs(-1);
  EXPECT_NEAR(sm1[0], -1.0 / 3, 1e-12);
  EXPECT_NEAR(sm1[1], 0, 1e-12);
  EXPECT_NEAR(sm1[2], 2, 1e-12);
  for (const Coeff& c : battery()) {
    if (c == 0 || c == -1) continue;
    const double cd = c.get_d();
    const SpecTriple expected(cd + 1, cd * cd + cd + 1, 0);
    const SpecTriple got = origin_eigs(c);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], expected[i], 1e-12) << c;
  }
}

}  // namespace
}  // namespace sle
