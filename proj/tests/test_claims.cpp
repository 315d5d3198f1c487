#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sle/claims.hpp"
#include "sle/seeds.hpp"

namespace sle {
namespace {

template <typename F>
ErrorCode code_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kBadConfig;
}

std::string measured_string(const ClaimReport& r, const std::string& key) {
  for (const auto& [k, v] : r.measured)
    if (k == key) return std::get<std::string>(v);
  return {};
}

TEST(Config, TextRoundTrip) {
  RunConfig a;
  a.grid_sizes = {9, 11};
  a.branch_step = 2.5e-7;
  a.c_battery = {Coeff(-1, 2), Coeff(3)};
  const RunConfig b = parse_config(config_text(a));
  EXPECT_EQ(config_text(a), config_text(b));
}

TEST(Config, DefaultsValidate) {
  const RunConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(c.c_battery.size(), 9u);
  EXPECT_EQ(c.c_battery[3], Coeff(-1, 2));
}

TEST(Config, CommentsAndOverrides) {
  const RunConfig c = parse_config("# comment\n\njet_degree = 8  # trailing\nseed=7\n");
  EXPECT_EQ(c.jet_degree, 8);
  EXPECT_EQ(c.seed, 7u);
}

TEST(Config, ParseErrors) {
  RunConfig c;
  EXPECT_EQ(code_of([&] { apply_setting(c, "no_such_key", "1"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { apply_setting(c, "grid_eps", "abc"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { apply_setting(c, "jet_degree", "4.5"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { parse_config("jet_degree 8\n"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_coeff("1/x"); }), ErrorCode::kParse);
}

TEST(Config, ValidationErrors) {
  RunConfig c;
  c.grid_sizes = {16};
  EXPECT_EQ(code_of([&] { validate(c); }), ErrorCode::kBadConfig);
  c = RunConfig();
  c.jet_degree = 3;
  EXPECT_EQ(code_of([&] { validate(c); }), ErrorCode::kBadConfig);
  c = RunConfig();
  c.newton_tolerance = 0;
  EXPECT_EQ(code_of([&] { validate(c); }), ErrorCode::kBadConfig);
}

TEST(Rational, ContinuedFractions) {
  EXPECT_EQ(rational_near(0.5), Coeff(1, 2));
  EXPECT_EQ(rational_near(-3.0), Coeff(-3));
  EXPECT_EQ(rational_near(1.0 / 3.0), Coeff(1, 3));
  EXPECT_EQ(rational_near(std::numbers::pi, 100), Coeff(22, 7));
}

TEST(ThetaMap, CotangentRule) {
  EXPECT_EQ(c_for_theta(0.0), Coeff(0));
  EXPECT_EQ(c_for_theta(std::numbers::pi / 4), Coeff(1));
  EXPECT_EQ(c_for_theta(std::atan(0.5)), Coeff(2));
  EXPECT_EQ(c_for_theta(-std::atan(2.0)), Coeff(-1, 2));
  EXPECT_EQ(code_of([] { c_for_theta(1.57); }), ErrorCode::kBadConfig);
  EXPECT_EQ(code_of([] { c_for_theta(-2.0); }), ErrorCode::kBadConfig);
}

TEST(Reports, JsonRoundTripIsStable) {
  const std::vector<ClaimReport> reports = {
      {"a-c=1", ClaimStatus::kPass, {{"x", 1.5}, {"n", 3L}}, {{"x", 1.0}}, "", ""},
      {"b", ClaimStatus::kFlagged, {{"v", "176"}}, {{"v", "16"}}, "differs", "oq-printed-expansions"}};
  const std::string text = reports_to_json(reports);
  const auto back = reports_from_json(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].status, ClaimStatus::kFlagged);
  EXPECT_EQ(std::get<long>(back[0].measured[1].second), 3);
  EXPECT_EQ(reports_to_json(back), text);
  EXPECT_FALSE(any_fail(back));
  EXPECT_EQ(code_of([] { reports_from_json("{\"id\": 1}"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { reports_from_json("not json"); }), ErrorCode::kParse);
}

TEST(RunStage, ErrorBecomesFailRecord) {
  std::vector<ClaimReport> out;
  run_stage(out, "stage-error", [] { throw Error(ErrorCode::kNoConvergence, "stuck"); });
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].status, ClaimStatus::kFail);
  EXPECT_NE(out[0].notes.find("NO_CONVERGENCE"), std::string::npos);
}

TEST(SeedClaims, BatteryPasses) {
  const RunConfig config;
  for (const auto& c : config.c_battery) {
    EXPECT_EQ(seed_residual_claim(c).status, ClaimStatus::kPass) << c;
    EXPECT_EQ(origin_eigenvalue_claim(c).status, ClaimStatus::kPass) << c;
  }
  EXPECT_EQ(measured_string(seed_residual_claim(-1), "variant"), to_string(SeedVariant::kVm1));
  EXPECT_EQ(measured_string(seed_residual_claim(0), "z3"), "16");
}

TEST(SeedClaims, PrintedCubicIsFlaggedWithPointer) {
  const ClaimReport r = printed_cubic_claim();
  EXPECT_EQ(r.status, ClaimStatus::kFlagged);
  EXPECT_FALSE(r.open_question.empty());
  EXPECT_EQ(measured_string(r, "y2z"), "-144");
}

TEST(SeedClaims, SeriesAndArtifact) {
  Artifacts a;
  EXPECT_EQ(series_claim(Coeff(1, 2), 6, &a).status, ClaimStatus::kPass);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(jet_from_text(a.begin()->second), solved_jet(Coeff(1, 2), 6));
}

TEST(BranchSettings, FollowFold) {
  const RunConfig config;
  const BranchSettings open = branch_settings(config, 0.1);
  EXPECT_DOUBLE_EQ(open.r_lo, 0.025);
  EXPECT_DOUBLE_EQ(open.r_hi, 0.05);
  const BranchSettings folded = branch_settings(config, 0.026);
  EXPECT_NEAR(folded.r_hi, 0.02002, 1e-12);
  EXPECT_NEAR(folded.r_lo, 0.01001, 1e-12);
  EXPECT_LT(folded.step, open.step);
  RunConfig manual;
  manual.branch_r_lo = 0.01;
  manual.branch_r_hi = 0.02;
  manual.branch_step = 1e-8;
  const BranchSettings m = branch_settings(manual, 0.1);
  EXPECT_DOUBLE_EQ(m.step, 1e-8);
}

TEST(FoldRadius, SeedsWithAndWithoutFold) {
  const auto dirs = fibonacci_sphere(400);
  const GradientMap<long double> g0(solved_jet(0, 12));
  EXPECT_DOUBLE_EQ(static_cast<double>(fold_radius(g0, 0.1L, dirs)), 0.1);
  const GradientMap<long double> gm2(solved_jet(-2, 12));
  const double f = static_cast<double>(fold_radius(gm2, 0.1L, dirs));
  EXPECT_GT(f, 0.015);
  EXPECT_LT(f, 0.04);
}

}  // namespace
}  // namespace sle
