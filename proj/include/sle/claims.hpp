#pragma once

// Claim records: each ties a measurement to the value it is checked against.
// Shared by the command-line tool and the acceptance driver.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sle/dirichlet.hpp"
#include "sle/jet.hpp"
#include "sle/legendre.hpp"

namespace sle {

enum class ClaimStatus { kPass, kFail, kFlagged };

std::string_view to_string(ClaimStatus s);
ClaimStatus claim_status_from(std::string_view s);

using ClaimValue = std::variant<long, double, std::string>;
using ClaimValues = std::vector<std::pair<std::string, ClaimValue>>;

struct ClaimReport {
  std::string id;
  ClaimStatus status = ClaimStatus::kPass;
  ClaimValues measured;
  ClaimValues claimed;
  std::string notes;
  std::string open_question;  // README anchor; set on every FLAGGED record
};

bool any_fail(const std::vector<ClaimReport>& reports);

/// Runs one stage; an exception becomes a FAIL record `id` carrying the message.
template <typename F>
void run_stage(std::vector<ClaimReport>& out, const std::string& id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    out.push_back({id, ClaimStatus::kFail, {}, {}, e.what(), {}});
  }
}

/// JSON array of reports; byte-identical for identical input.
std::string reports_to_json(const std::vector<ClaimReport>& reports);
std::vector<ClaimReport> reports_from_json(std::string_view text);

/// Named text artifacts (CSV, jets, fields) produced alongside the reports.
using Artifacts = std::map<std::string, std::string>;

struct RunConfig {
  std::vector<Coeff> c_battery;
  int jet_degree = 12;
  double working_radius = 0.1;  // p-space ball of the gradient map
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  int involution_samples = 200;
  double involution_step = 1e-6;
  long injectivity_pairs = 100000;
  int branch_samples = 100;
  double branch_r_lo = 0.0;  // 0 selects from the fold radius
  double branch_r_hi = 0.0;
  double branch_step = 0.0;

  double profile_r0 = 0.0;  // 0 selects from the axis image
  double profile_ratio = 0.5;
  int profile_count = 14;
  int profile_directions = 20;
  double blowup_relative_step = 1e-2;

  double grid_eps = 1e-3;  // q-space ball around the image of the origin
  std::vector<int> residual_sizes = {33, 65};
  std::vector<int> grid_sizes = {17, 25, 33};
  int trace_directions = 6000;
  int relax_sweeps = 200;
  double newton_tolerance = 1e-8;
  int newton_max_iterations = 60;
  int subaffine_trials = 200;

  RunConfig();
};

/// key=value lines, one per field, in declaration order.
std::string config_text(const RunConfig& config);
/// Throws PARSE on unknown keys or malformed values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
/// '#' starts a comment; blank lines are ignored.
RunConfig parse_config(std::string_view text, RunConfig base = RunConfig());
/// Throws BAD_CONFIG: tolerances and steps positive, jet_degree >= 4, grid sizes odd.
void validate(const RunConfig& config);

Coeff parse_coeff(std::string_view text);
/// Last continued-fraction convergent of x with denominator <= max_den.
Coeff rational_near(double x, long max_den = 10000);

// Seed polynomials and series.
ClaimReport seed_residual_claim(const Coeff& c, Artifacts* artifacts = nullptr);
/// Degree-3 residual coefficients of the c = 0 seed against the printed display.
ClaimReport printed_cubic_claim();
ClaimReport origin_eigenvalue_claim(const Coeff& c);
ClaimReport series_claim(const Coeff& c, int degree, Artifacts* artifacts = nullptr);

Jet solved_jet(const Coeff& c, int degree);

// Legendre transform.
struct BranchSettings {
  double r_lo;
  double r_hi;
  double step;
};

/// Annulus and step for the branch check: [0.025, 0.05] and 1e-7 when the
/// gradient map has no fold within the working radius, otherwise an annulus
/// inside the fold with the step scaled by (r_lo / 0.025)^(3/2).
BranchSettings branch_settings(const RunConfig& config, double fold);

/// Annulus |p| in [radius/4, radius/2]; radius is the working radius clipped to the fold.
ClaimReport involution_claim(const Coeff& c, const LegendreTransform<long double>& lt, double radius,
                             const RunConfig& config, Artifacts* artifacts = nullptr);
ClaimReport injectivity_claim(const Coeff& c, const LegendreTransform<long double>& lt, double radius,
                              const RunConfig& config);
/// Spread, signature and measured theta' (against -atan c and the cot map).
std::vector<ClaimReport> branch_claims(const Coeff& c, const LegendreTransform<long double>& lt,
                                       const BranchSettings& settings, const RunConfig& config);

// Regularity near the image of the origin.
std::vector<double> profile_radii(const Jet& u, const RunConfig& config);
std::vector<ClaimReport> regularity_claims(const Coeff& c, const Jet& u, const LegendreTransform<long double>& lt,
                                           const RunConfig& config, Artifacts* artifacts = nullptr);

// Grid level.
ClaimReport grid_residual_claim(const Coeff& c, const LegendreTransform<long double>& lt, const RunConfig& config,
                                Artifacts* artifacts = nullptr);
/// Newton from boundary data only at each grid size, plus sup-distance monotonicity.
/// `fields` receives the solved fields (for the subaffine claim).
ClaimReport dirichlet_claim(const Coeff& c, const LegendreTransform<long double>& lt, const RunConfig& config,
                            Artifacts* artifacts = nullptr, std::vector<std::pair<BallGrid, GridField>>* fields = nullptr);
/// Gated on sampled fields at every grid size; solved fields are informational.
ClaimReport subaffine_claim(const Coeff& c, const LegendreTransform<long double>& lt, const RunConfig& config,
                            const std::vector<std::pair<BallGrid, GridField>>& solved);

// Eigenvalue-space checks.
std::vector<ClaimReport> spectral_claims(const RunConfig& config);

/// theta in (-pi/2, pi/2) with 1e-3 margin; c = cot(theta) rounded by
/// rational_near, c = 0 at theta = 0. Throws BAD_CONFIG otherwise.
Coeff c_for_theta(double theta);

/// Every stage for one theta; a stage that throws contributes a FAIL record
/// carrying the error and the remaining stages still run.
std::vector<ClaimReport> pipeline_claims(double theta, const RunConfig& config, Artifacts* artifacts = nullptr);

}  // namespace sle
