#include "sle/claims.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "sle/regularity.hpp"
#include "sle/seeds.hpp"
#include "sle/spectral.hpp"

namespace sle {
namespace {

using LD = long double;
using VecList = std::vector<Vec3<LD>, Eigen::aligned_allocator<Vec3<LD>>>;
using json = nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(sep, start), text.size());
    out.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kParse, "bad number for " + std::string(key) + ": " + std::string(v));
  }
  return x;
}

long parse_long(std::string_view key, std::string_view v) {
  long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kParse, "bad integer for " + std::string(key) + ": " + std::string(v));
  }
  return x;
}

std::vector<int> parse_ints(std::string_view key, std::string_view v) {
  std::vector<int> out;
  for (const auto& s : split(v, ',')) out.push_back(static_cast<int>(parse_long(key, trim(s))));
  return out;
}

std::string cid(const std::string& name, const Coeff& c) { return name + "-c=" + c.get_str(); }

std::string signature_text(const std::array<int, 3>& s) {
  const auto neg = std::count(s.begin(), s.end(), -1), pos = std::count(s.begin(), s.end(), 1);
  return std::to_string(neg) + " negative, " + std::to_string(pos) + " positive";
}

// "x^a y^b z^c: coeff" terms on one line.
std::string terms_text(const Jet& j) {
  std::string s;
  for (const auto& [e, c] : j.terms()) {
    std::string mono;
    for (const auto& [name, k] : {std::pair{'x', e.x}, std::pair{'y', e.y}, std::pair{'z', e.z}}) {
      if (k == 0) continue;
      mono += std::string(mono.empty() ? "" : " ") + name + (k > 1 ? "^" + std::to_string(k) : "");
    }
    s += (s.empty() ? "" : "; ") + (mono.empty() ? "1" : mono) + ": " + c.get_str();
  }
  return s;
}

template <typename F>
double max_over(int n, F f) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, f(i));
  return m;
}

}  // namespace

std::string_view to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::kPass: return "PASS";
    case ClaimStatus::kFail: return "FAIL";
    case ClaimStatus::kFlagged: return "FLAGGED";
  }
  return "FAIL";
}

ClaimStatus claim_status_from(std::string_view s) {
  if (s == "PASS") return ClaimStatus::kPass;
  if (s == "FAIL") return ClaimStatus::kFail;
  if (s == "FLAGGED") return ClaimStatus::kFlagged;
  throw Error(ErrorCode::kParse, "unknown claim status " + std::string(s));
}

bool any_fail(const std::vector<ClaimReport>& reports) {
  return std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.status == ClaimStatus::kFail; });
}

std::string reports_to_json(const std::vector<ClaimReport>& reports) {
  auto values = [](const ClaimValues& vs) {
    json o = json::object();
    for (const auto& [k, v] : vs) std::visit([&](const auto& x) { o[k] = x; }, v);
    return o;
  };
  json arr = json::array();
  for (const auto& r : reports) {
    json o;
    o["id"] = r.id;
    o["status"] = std::string(to_string(r.status));
    o["measured"] = values(r.measured);
    o["claimed"] = values(r.claimed);
    o["notes"] = r.notes;
    o["open_question"] = r.open_question;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<ClaimReport> reports_from_json(std::string_view text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report is not valid JSON: ") + e.what());
  }
  if (!arr.is_array()) throw Error(ErrorCode::kParse, "report must be a JSON array");
  auto values = [](const json& o) {
    ClaimValues vs;
    for (const auto& [k, v] : o.items()) {
      if (v.is_number_integer()) {
        vs.emplace_back(k, v.get<long>());
      } else if (v.is_number()) {
        vs.emplace_back(k, v.get<double>());
      } else {
        vs.emplace_back(k, v.get<std::string>());
      }
    }
    return vs;
  };
  std::vector<ClaimReport> out;
  try {
    for (const auto& o : arr) {
      out.push_back({o.at("id").get<std::string>(), claim_status_from(o.at("status").get<std::string>()),
                     values(o.at("measured")), values(o.at("claimed")), o.at("notes").get<std::string>(),
                     o.at("open_question").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed report record: ") + e.what());
  }
  return out;
}

RunConfig::RunConfig() {
  for (const char* s : {"-3", "-2", "-1", "-1/2", "0", "1/2", "1", "2", "3"}) c_battery.push_back(parse_coeff(s));
}

std::string config_text(const RunConfig& c) {
  std::ostringstream os;
  std::string battery;
  for (std::size_t i = 0; i < c.c_battery.size(); ++i) battery += (i ? "," : "") + c.c_battery[i].get_str();
  os << "c_battery=" << battery << '\n'
     << "jet_degree=" << c.jet_degree << '\n'
     << "working_radius=" << fmt(c.working_radius) << '\n'
     << "seed=" << c.seed << '\n'
     << "out_dir=" << c.out_dir << '\n'
     << "involution_samples=" << c.involution_samples << '\n'
     << "involution_step=" << fmt(c.involution_step) << '\n'
     << "injectivity_pairs=" << c.injectivity_pairs << '\n'
     << "branch_samples=" << c.branch_samples << '\n'
     << "branch_r_lo=" << fmt(c.branch_r_lo) << '\n'
     << "branch_r_hi=" << fmt(c.branch_r_hi) << '\n'
     << "branch_step=" << fmt(c.branch_step) << '\n'
     << "profile_r0=" << fmt(c.profile_r0) << '\n'
     << "profile_ratio=" << fmt(c.profile_ratio) << '\n'
     << "profile_count=" << c.profile_count << '\n'
     << "profile_directions=" << c.profile_directions << '\n'
     << "blowup_relative_step=" << fmt(c.blowup_relative_step) << '\n'
     << "grid_eps=" << fmt(c.grid_eps) << '\n'
     << "residual_sizes=" << join(c.residual_sizes) << '\n'
     << "grid_sizes=" << join(c.grid_sizes) << '\n'
     << "trace_directions=" << c.trace_directions << '\n'
     << "relax_sweeps=" << c.relax_sweeps << '\n'
     << "newton_tolerance=" << fmt(c.newton_tolerance) << '\n'
     << "newton_max_iterations=" << c.newton_max_iterations << '\n'
     << "subaffine_trials=" << c.subaffine_trials << '\n';
  return os.str();
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  auto as_int = [&] { return static_cast<int>(parse_long(key, v)); };
  if (key == "c_battery") {
    c.c_battery.clear();
    for (const auto& s : split(v, ',')) c.c_battery.push_back(parse_coeff(trim(s)));
  } else if (key == "jet_degree") {
    c.jet_degree = as_int();
  } else if (key == "working_radius") {
    c.working_radius = parse_double(key, v);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_long(key, v));
  } else if (key == "out_dir") {
    c.out_dir = std::string(v);
  } else if (key == "involution_samples") {
    c.involution_samples = as_int();
  } else if (key == "involution_step") {
    c.involution_step = parse_double(key, v);
  } else if (key == "injectivity_pairs") {
    c.injectivity_pairs = parse_long(key, v);
  } else if (key == "branch_samples") {
    c.branch_samples = as_int();
  } else if (key == "branch_r_lo") {
    c.branch_r_lo = parse_double(key, v);
  } else if (key == "branch_r_hi") {
    c.branch_r_hi = parse_double(key, v);
  } else if (key == "branch_step") {
    c.branch_step = parse_double(key, v);
  } else if (key == "profile_r0") {
    c.profile_r0 = parse_double(key, v);
  } else if (key == "profile_ratio") {
    c.profile_ratio = parse_double(key, v);
  } else if (key == "profile_count") {
    c.profile_count = as_int();
  } else if (key == "profile_directions") {
    c.profile_directions = as_int();
  } else if (key == "blowup_relative_step") {
    c.blowup_relative_step = parse_double(key, v);
  } else if (key == "grid_eps") {
    c.grid_eps = parse_double(key, v);
  } else if (key == "residual_sizes") {
    c.residual_sizes = parse_ints(key, v);
  } else if (key == "grid_sizes") {
    c.grid_sizes = parse_ints(key, v);
  } else if (key == "trace_directions") {
    c.trace_directions = as_int();
  } else if (key == "relax_sweeps") {
    c.relax_sweeps = as_int();
  } else if (key == "newton_tolerance") {
    c.newton_tolerance = parse_double(key, v);
  } else if (key == "newton_max_iterations") {
    c.newton_max_iterations = as_int();
  } else if (key == "subaffine_trials") {
    c.subaffine_trials = as_int();
  } else {
    throw Error(ErrorCode::kParse, "unknown config key " + std::string(key));
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kBadConfig, what);
  };
  require(c.jet_degree >= 4, "jet_degree must be >= 4");
  require(!c.c_battery.empty(), "c_battery is empty");
  require(c.working_radius > 0 && c.involution_step > 0 && c.grid_eps > 0 && c.newton_tolerance > 0 &&
              c.blowup_relative_step > 0,
          "radii, steps and tolerances must be positive");
  require(c.branch_r_lo >= 0 && c.branch_r_hi >= 0 && c.branch_step >= 0 && c.profile_r0 >= 0,
          "branch and profile overrides must be >= 0 (0 selects automatically)");
  require(c.profile_ratio > 0 && c.profile_ratio < 1, "profile_ratio must be in (0, 1)");
  require(c.profile_count >= 8, "profile_count must be >= 8");
  require(c.involution_samples > 0 && c.branch_samples > 0 && c.injectivity_pairs > 0 && c.trace_directions >= 3 &&
              c.relax_sweeps >= 0 && c.newton_max_iterations > 0 && c.subaffine_trials >= 0 &&
              c.profile_directions >= 0,
          "counts must be positive");
  for (int n : c.grid_sizes) require(n >= 3 && n % 2 == 1, "grid sizes must be odd and >= 3");
  for (int n : c.residual_sizes) require(n >= 3 && n % 2 == 1, "residual sizes must be odd and >= 3");
}

Coeff parse_coeff(std::string_view text) {
  const std::string s(trim(text));
  Coeff c;
  if (s.empty() || c.set_str(s, 10) != 0 || (s.find('/') != std::string::npos && c.get_den() == 0)) {
    throw Error(ErrorCode::kParse, "bad rational " + s);
  }
  c.canonicalize();
  return c;
}

Coeff rational_near(double x, long max_den) {
  if (!std::isfinite(x)) throw Error(ErrorCode::kBadConfig, "cannot approximate a non-finite value");
  // Convergents h/k of the continued fraction of x.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int i = 0; i < 64; ++i) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    const long h2 = ai * h1 + h0;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (std::abs(static_cast<double>(h1) / k1 - x) < 1e-15 * std::max(1.0, std::abs(x)) || r == a) break;
    r = 1.0 / (r - a);
  }
  Coeff c(h1, k1);
  c.canonicalize();
  return c;
}

ClaimReport seed_residual_claim(const Coeff& c, Artifacts* artifacts) {
  const SeedSpec spec = SeedSpec::for_c(c);
  const SeedResult seed = seed_polynomial(spec, 8);
  const Jet r = equation_residual(c, seed.jet);
  ClaimReport rep{cid("seed-residual", c), ClaimStatus::kPass, {}, {}, {}, {}};
  const bool low_zero = r.is_zero() || r.min_term_degree() >= 3;
  rep.status = low_zero ? ClaimStatus::kPass : ClaimStatus::kFail;
  rep.measured = {{"variant", to_string(spec.variant)},
                  {"adopted_coefficients", seed.adopted},
                  {"lowest_nonzero_degree", static_cast<long>(r.is_zero() ? -1 : r.min_term_degree())},
                  {"degree3_terms", static_cast<long>(r.homogeneous_part(3).terms().size())},
                  {"degree3_part", terms_text(r.homogeneous_part(3))}};
  if (c == 0) {
    rep.measured.emplace_back("z3", r.coeff({0, 0, 3}).get_str());
    rep.measured.emplace_back("y2z", r.coeff({0, 2, 1}).get_str());
    rep.measured.emplace_back("x2z", r.coeff({2, 0, 1}).get_str());
  }
  rep.claimed = {{"nonzero_terms_through_degree_2", 0L}};
  rep.notes = "exact rational residual of the seed";
  if (artifacts) {
    (*artifacts)["residual_c=" + c.get_str() + ".jet"] = to_text(r.homogeneous_part(3) + r.homogeneous_part(4));
  }
  return rep;
}

ClaimReport printed_cubic_claim() {
  const Jet r = equation_residual(0, seed_polynomial(SeedSpec::for_c(0), 8).jet);
  const Coeff z3 = r.coeff({0, 0, 3}), y2z = r.coeff({0, 2, 1}), x2z = r.coeff({2, 0, 1});
  ClaimReport rep{"printed-cubic-residual-c=0", ClaimStatus::kPass, {}, {}, {}, {}};
  rep.measured = {{"z3", z3.get_str()}, {"y2z", y2z.get_str()}, {"x2z", x2z.get_str()}};
  rep.claimed = {{"z3", "16"}, {"y2z", "-144"}, {"x2z", "16"}};
  if (z3 != 16 || y2z != -144) {
    rep.status = ClaimStatus::kFail;
    rep.notes = "hard coefficients disagree with the printed display";
  } else if (x2z != 16) {
    rep.status = ClaimStatus::kFlagged;
    rep.notes = "z3 and y2z match; the x2z coefficient differs from the printed 4 * 4 (typo candidate)";
    rep.open_question = "oq-printed-expansions";
  }
  return rep;
}

ClaimReport origin_eigenvalue_claim(const Coeff& c) {
  const SeedSpec spec = SeedSpec::for_c(c);
  const SpecTriple got = eig3(hessian(seed_polynomial(spec).jet).at_origin());
  const double cd = c.get_d();
  SpecTriple want;
  switch (spec.variant) {
    case SeedVariant::kV0: want = {1, 1, 0}; break;
    case SeedVariant::kVm1: want = {2, 0, -1.0 / 3.0}; break;
    case SeedVariant::kVc: want = {cd + 1, cd * cd + cd + 1, 0}; break;
  }
  const double err = max_over(3, [&](int i) { return std::abs(got[i] - want[i]); });
  ClaimReport rep{cid("origin-eigenvalues", c), err < 1e-12 ? ClaimStatus::kPass : ClaimStatus::kFail, {}, {}, {}, {}};
  rep.measured = {{"l1", got[0]}, {"l2", got[1]}, {"l3", got[2]}, {"max_error", err}};
  rep.claimed = {{"l1", want[0]}, {"l2", want[1]}, {"l3", want[2]}, {"tolerance", 1e-12}};
  return rep;
}

Jet solved_jet(const Coeff& c, int degree) {
  return cauchy_solve(c, cauchy_data_of(seed_polynomial(SeedSpec::for_c(c)).jet), degree);
}

ClaimReport series_claim(const Coeff& c, int degree, Artifacts* artifacts) {
  const Jet seed = seed_polynomial(SeedSpec::for_c(c)).jet;
  const Jet u = solved_jet(c, degree);
  const bool reproduces = u.truncated(4) == seed;
  const Jet r = equation_residual(c, u);
  ClaimReport rep{cid("series-extension", c),
                  reproduces && r.is_zero() ? ClaimStatus::kPass : ClaimStatus::kFail,
                  {},
                  {},
                  {},
                  {}};
  rep.measured = {{"degree", static_cast<long>(degree)},
                  {"reproduces_seed_through_4", reproduces ? "yes" : "no"},
                  {"residual_zero_through", static_cast<long>(r.is_zero() ? degree - 2 : r.min_term_degree() - 1)},
                  {"terms", static_cast<long>(u.terms().size())}};
  rep.claimed = {{"reproduces_seed_through_4", "yes"}, {"residual_zero_through", static_cast<long>(degree - 2)}};
  if (artifacts) (*artifacts)["u_c=" + c.get_str() + "_N=" + std::to_string(degree) + ".jet"] = to_text(u);
  return rep;
}

BranchSettings branch_settings(const RunConfig& config, double fold) {
  if (config.branch_r_lo > 0 && config.branch_r_hi > config.branch_r_lo) {
    return {config.branch_r_lo, config.branch_r_hi, config.branch_step > 0 ? config.branch_step : 3e-7};
  }
  BranchSettings s{0.025, 0.05, 3e-7};
  if (fold < config.working_radius) {
    s.r_hi = std::min(0.05, 0.77 * fold);
    s.r_lo = s.r_hi / 2;
    s.step = 3e-7 * std::pow(s.r_lo / 0.025, 1.5);
  }
  if (config.branch_step > 0) s.step = config.branch_step;
  return s;
}

ClaimReport involution_claim(const Coeff& c, const LegendreTransform<LD>& lt, double radius,
                             const RunConfig& config, Artifacts* artifacts) {
  const double eps = radius;
  VecList pre;
  const VecList qs = annulus_images(lt.gradient_map(), config.involution_samples, LD(eps / 4), LD(eps / 2),
                                    config.seed, &pre);
  double defect = 0.0, round_trip = 0.0, min_eig = std::numeric_limits<double>::infinity();
  long unresolved = 0;
  std::vector<LegendreSample<LD>> samples;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const Vec3<LD> p = lt.invert(qs[i]);
    round_trip = std::max(round_trip, static_cast<double>((p - pre[i]).norm()));
    const Eigen::Matrix3d h = lt.gradient_map().jacobian(p).template cast<double>();
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(h).eigenvalues().cwiseAbs().minCoeff());
    try {
      const double d = static_cast<double>(lt.hessian_inverse_defect(qs[i], LD(config.involution_step)));
      defect = std::max(defect, d);
      samples.push_back({qs[i], p, lt.value_at(qs[i], p), LD(d)});
    } catch (const Error&) {
      // The stencil leaves the region where the gradient map is locally invertible.
      ++unresolved;
      samples.push_back({qs[i], p, lt.value_at(qs[i], p), std::numeric_limits<LD>::quiet_NaN()});
    }
  }
  ClaimReport rep{cid("legendre-involution", c),
                  unresolved == 0 && defect < 1e-6 && round_trip < 1e-10 ? ClaimStatus::kPass : ClaimStatus::kFail,
                  {},
                  {},
                  {},
                  {}};
  rep.measured = {{"samples", static_cast<long>(qs.size())},
                  {"max_hessian_inverse_defect", defect},
                  {"max_round_trip_error", round_trip},
                  {"unresolved_stencils", unresolved},
                  {"min_abs_eigenvalue_of_hessian", min_eig},
                  {"step", config.involution_step},
                  {"radius", radius}};
  rep.claimed = {{"max_hessian_inverse_defect", 1e-6}, {"max_round_trip_error", 1e-10}};
  rep.notes = "annulus |p| in [radius/4, radius/2], Richardson finite-difference Hessian of the transform";
  if (rep.status == ClaimStatus::kFail) {
    rep.notes += "; samples near det D^2u = 0 need a step below |lambda_min| times the stencil scale";
  }
  if (artifacts) {
    std::ostringstream os;
    write_samples_csv(os, samples);
    (*artifacts)["samples_c=" + c.get_str() + ".csv"] = os.str();
  }
  return rep;
}

ClaimReport injectivity_claim(const Coeff& c, const LegendreTransform<LD>& lt, double radius,
                              const RunConfig& config) {
  const InjectivityReport r = injectivity_scan(lt.gradient_map(), config.injectivity_pairs, LD(radius), config.seed);
  ClaimReport rep{cid("gradient-injectivity", c), r.collisions == 0 ? ClaimStatus::kPass : ClaimStatus::kFail,
                  {}, {}, {}, {}};
  rep.measured = {{"pairs", r.pairs}, {"collisions", r.collisions}, {"min_ratio", r.min_ratio}, {"radius", radius}};
  rep.claimed = {{"collisions", 0L}};
  rep.notes = "ratio |grad u(p) - grad u(p')| / |p - p'|^3; collision below 1e-8";
  return rep;
}

std::vector<ClaimReport> branch_claims(const Coeff& c, const LegendreTransform<LD>& lt, const BranchSettings& s,
                                       const RunConfig& config) {
  const VecList qs =
      annulus_images(lt.gradient_map(), config.branch_samples, LD(s.r_lo), LD(s.r_hi), config.seed + 1);
  const BranchReport b = transform_branch_constant(lt, qs, LD(s.step));
  const double cd = c.get_d();
  std::vector<ClaimReport> out;

  ClaimReport constant{cid("branch-constant", c),
                       b.spread < 1e-5 && qs.size() >= 100 ? ClaimStatus::kPass : ClaimStatus::kFail,
                       {},
                       {},
                       {},
                       {}};
  constant.measured = {{"theta_mean", b.theta_mean}, {"spread", b.spread}, {"samples", static_cast<long>(qs.size())},
                       {"r_lo", s.r_lo},          {"r_hi", s.r_hi},     {"step", s.step}};
  constant.claimed = {{"spread", 1e-5}, {"min_samples", 100L}};
  out.push_back(constant);

  const std::array<int, 3> want = c >= -1 ? std::array<int, 3>{-1, 1, 1} : std::array<int, 3>{-1, -1, 1};
  const bool match = b.signature_uniform && b.signatures.front() == want;
  ClaimReport sig{cid("branch-signature", c), match ? ClaimStatus::kPass : ClaimStatus::kFail, {}, {}, {}, {}};
  sig.measured = {{"signature", signature_text(b.signatures.front())},
                  {"uniform", b.signature_uniform ? "yes" : "no"},
                  {"axis_cubic_m", lt.gradient_map().axis_cubic().get_str()}};
  sig.claimed = {{"signature", signature_text(want)}, {"display", c >= -1 ? "(+, +, -)" : "(-, -, +)"}};
  if (!match) {
    sig.notes =
        "the eigenvalue of D^2u that vanishes at the origin has the sign of -m near it; with m < 0 it is 0+, "
        "so the transform has one negative eigenvalue, not two";
  }
  out.push_back(sig);

  const double derived = -std::atan(cd);
  const double cot_map = c == 0 ? 0.0 : std::atan(1.0 / cd);
  ClaimReport map{cid("branch-theta-map", c), ClaimStatus::kPass, {}, {}, {}, {}};
  map.measured = {{"theta_measured", b.theta_mean}, {"minus_atan_c", derived}};
  map.claimed = {{"theta_from_cot_map", cot_map}};
  if (std::abs(b.theta_mean - derived) > 1e-5) {
    map.status = ClaimStatus::kFail;
    map.notes = "measured theta' disagrees with the eigenvalue accounting -atan(c)";
  } else if (std::abs(b.theta_mean - cot_map) > 1e-5) {
    map.status = ClaimStatus::kFlagged;
    map.notes = "measured theta' equals -atan(c), not the theta with cot(theta) = c";
    map.open_question = "oq-theta-map";
  }
  out.push_back(map);
  return out;
}

std::vector<double> profile_radii(const Jet& u, const RunConfig& config) {
  double r0 = config.profile_r0;
  if (r0 <= 0) {
    // Largest z-interval on which u_z(0, 0, z) stays monotone, then 3/4 of the
    // smaller axis image at its ends.
    const Polynomial<LD> p(u);
    const LD R = LD(config.working_radius);
    LD reach = R;
    for (int sign : {-1, 1}) {
      for (int k = 1; k <= 200; ++k) {
        const LD z = sign * R * k / 200;
        if (p.hessian(Vec3<LD>(0, 0, z))(2, 2) * p.hessian(Vec3<LD>(0, 0, sign * R / 200))(2, 2) <= 0) {
          reach = std::min(reach, std::abs(z) - R / 200);
          break;
        }
      }
    }
    const LD lo = std::abs(p.gradient(Vec3<LD>(0, 0, -reach))(2));
    const LD hi = std::abs(p.gradient(Vec3<LD>(0, 0, reach))(2));
    r0 = 0.75 * static_cast<double>(std::min(lo, hi));
  }
  return geometric_radii(r0, config.profile_ratio, config.profile_count);
}

std::vector<ClaimReport> regularity_claims(const Coeff& c, const Jet& u, const LegendreTransform<LD>& lt,
                                           const RunConfig& config, Artifacts* artifacts) {
  const std::vector<double> radii = profile_radii(u, config);
  std::vector<ClaimReport> out;

  const RayProfile axis = holder_profile(lt, Eigen::Vector3d::UnitZ(), radii);
  const PowerFit a = holder_fit(axis);
  RayProfile oracle{Eigen::Vector3d::UnitZ(), radii, {}};
  for (double r : radii) {
    oracle.values.push_back(std::abs(static_cast<double>(axis_inverse_oracle(u, r, LD(config.working_radius)))));
  }
  const PowerFit ao = holder_fit(oracle);
  ClaimReport ra{cid("holder-alpha-axis", c),
                 a.exponent >= 0.32 && a.exponent <= 0.345 ? ClaimStatus::kPass : ClaimStatus::kFail,
                 {},
                 {},
                 {},
                 {}};
  ra.measured = {{"alpha", a.exponent},          {"constant", a.constant}, {"fit_residual", a.residual},
                 {"alpha_axis_oracle", ao.exponent}, {"r0", radii.front()},   {"points", static_cast<long>(a.n_points)}};
  ra.claimed = {{"alpha", 1.0 / 3.0}, {"alpha_min", 0.32}, {"alpha_max", 0.345}};
  out.push_back(ra);

  std::mt19937_64 rng(config.seed + 2);
  std::normal_distribution<double> normal;
  double amin = 1e9, amax = -1e9;
  for (int i = 0; i < config.profile_directions; ++i) {
    const Eigen::Vector3d d(normal(rng), normal(rng), normal(rng));
    const double alpha = holder_fit(holder_profile(lt, d, radii)).exponent;
    amin = std::min(amin, alpha);
    amax = std::max(amax, alpha);
  }
  ClaimReport rd{cid("holder-alpha-directions", c),
                 config.profile_directions == 0 || (amin >= 0.30 && amax <= 0.37) ? ClaimStatus::kPass
                                                                                   : ClaimStatus::kFail,
                 {},
                 {},
                 {},
                 {}};
  rd.measured = {{"directions", static_cast<long>(config.profile_directions)}, {"alpha_min", amin}, {"alpha_max", amax}};
  rd.claimed = {{"alpha_min", 0.30}, {"alpha_max", 0.37}};
  out.push_back(rd);

  const RayProfile up = blowup_profile(lt, Eigen::Vector3d::UnitZ(), radii, config.blowup_relative_step);
  const RayProfile down = blowup_profile(lt, -Eigen::Vector3d::UnitZ(), radii, config.blowup_relative_step);
  const PowerFit bu = blowup_fit(up), bd = blowup_fit(down);
  auto in_range = [](double b) { return b >= -0.70 && b <= -0.63; };
  ClaimReport rb{cid("blowup-beta", c), in_range(bu.exponent) && in_range(bd.exponent) ? ClaimStatus::kPass
                                                                                       : ClaimStatus::kFail,
                 {}, {}, {}, {}};
  rb.measured = {{"beta_plus_w", bu.exponent}, {"beta_minus_w", bd.exponent}, {"alpha_plus_abs_beta", a.exponent - bu.exponent}};
  rb.claimed = {{"beta", -2.0 / 3.0}, {"beta_min", -0.70}, {"beta_max", -0.63}};
  out.push_back(rb);

  const double m = std::abs(lt.gradient_map().axis_cubic().get_d());
  const double m_closed = std::abs(axis_cubic_closed_form(c).get_d());
  const double printed = 2.0 / (3.0 * m_closed);
  const double derived = std::cbrt(16.0 * m * m) / (12.0 * m);
  ClaimReport rc{cid("blowup-constant", c), ClaimStatus::kPass, {}, {}, {}, {}};
  rc.measured = {{"constant", bu.constant}, {"axis_derived_constant", derived}};
  rc.claimed = {{"constant", printed}};
  if (std::abs(bu.constant - printed) > 0.2 * printed) {
    rc.status = ClaimStatus::kFlagged;
    rc.notes = "fitted constant matches (4|m|)^(2/3) / (12|m|) from the axis expansion, not 2 / (3 m)";
    rc.open_question = "oq-blowup-constant";
  }
  if (std::abs(bu.constant - derived) > 0.2 * derived) {
    rc.status = ClaimStatus::kFail;
    rc.notes = "fitted constant disagrees with the axis expansion";
  }
  out.push_back(rc);

  if (artifacts) {
    std::ostringstream h, bl;
    write_profile_csv(h, axis);
    write_profile_csv(bl, up);
    (*artifacts)["holder_axis_c=" + c.get_str() + ".csv"] = h.str();
    (*artifacts)["blowup_axis_c=" + c.get_str() + ".csv"] = bl.str();
  }
  return out;
}

ClaimReport grid_residual_claim(const Coeff& c, const LegendreTransform<LD>& lt, const RunConfig& config,
                                Artifacts* artifacts) {
  const double theta = -std::atan(c.get_d());
  const double rho = config.grid_eps / 4;
  ClaimReport rep{cid("grid-residual", c), ClaimStatus::kPass, {}, {}, {}, {}};
  std::vector<double> res;
  for (int n : config.residual_sizes) {
    const BallGrid grid(n, config.grid_eps);
    const ResidualReport r = fd_arctan_residual(grid, sample_field(lt, grid), theta, rho);
    res.push_back(r.max_res);
    rep.measured.emplace_back("max_res_n=" + std::to_string(n), r.max_res);
    if (artifacts) {
      std::ostringstream os;
      write_residual_csv(os, r);
      (*artifacts)["residual_c=" + c.get_str() + "_n=" + std::to_string(n) + ".csv"] = os.str();
    }
  }
  const bool small = !res.empty() && res.front() < 5e-3;
  const bool decreasing = res.size() < 2 || res.front() >= 3.0 * res.back();
  if (res.size() >= 2) rep.measured.emplace_back("reduction_factor", res.front() / res.back());
  rep.measured.emplace_back("rho", rho);
  rep.claimed = {{"max_res_first", 5e-3}, {"reduction_factor_min", 3.0}};
  if (!small || !decreasing) {
    rep.status = ClaimStatus::kFail;
    rep.notes =
        "the transform has a near-singular layer close to the w = 0 plane near the origin (eigenvalue ~ -1/(8x^2) "
        "at p = (x, x, 0)), thinner than the grid spacing, so the centred stencil does not resolve it and the "
        "residual grows under refinement";
  }
  return rep;
}

ClaimReport dirichlet_claim(const Coeff& c, const LegendreTransform<LD>& lt, const RunConfig& config,
                            Artifacts* artifacts, std::vector<std::pair<BallGrid, GridField>>* fields) {
  const double theta = -std::atan(c.get_d());
  const BoundaryTrace<LD> trace = boundary_trace(lt, LD(config.grid_eps), config.trace_directions);
  const std::vector<double> values(trace.values.begin(), trace.values.end());
  NewtonOptions opt;
  opt.tolerance = config.newton_tolerance;
  opt.max_iterations = config.newton_max_iterations;
  ClaimReport rep{cid("dirichlet-refinement", c), ClaimStatus::kPass, {}, {}, {}, {}};
  bool all_converged = true, monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int n : config.grid_sizes) {
    const BallGrid grid(n, config.grid_eps);
    const GridField init =
        zero_knowledge_init(grid, boundary_from_trace(grid, trace.directions, values), theta, config.relax_sweeps);
    const NewtonResult r = dirichlet_newton(grid, init, theta, opt);
    const double sup = sup_distance(grid, r.field, sample_field(lt, grid), config.grid_eps / 4);
    const bool ok = r.stats.status == NewtonStatus::kConverged;
    all_converged = all_converged && ok;
    monotone = monotone && sup <= prev;
    prev = sup;
    const std::string k = "_n=" + std::to_string(n);
    rep.measured.emplace_back("converged" + k, ok ? "yes" : "no");
    rep.measured.emplace_back("iterations" + k, static_cast<long>(r.stats.iterations));
    rep.measured.emplace_back("final_res" + k, r.stats.final_res);
    rep.measured.emplace_back("sup_dist" + k, sup);
    if (artifacts) {
      std::ostringstream f;
      write_field_text(f, grid, r.field);
      (*artifacts)["dirichlet_c=" + c.get_str() + k + ".txt"] = f.str();
      json stats;
      stats["iters"] = r.stats.iterations;
      stats["final_res"] = r.stats.final_res;
      stats["sup_dist"] = sup;
      (*artifacts)["dirichlet_stats_c=" + c.get_str() + k + ".json"] = stats.dump(2) + "\n";
    }
    if (fields) fields->emplace_back(grid, r.field);
  }
  rep.claimed = {{"final_res_max", config.newton_tolerance}, {"sup_dist", "non-increasing"}};
  rep.notes = "boundary from the transform's trace; interior from harmonic extension and relaxation sweeps only";
  if (!all_converged || !monotone) rep.status = ClaimStatus::kFail;
  return rep;
}

ClaimReport subaffine_claim(const Coeff& c, const LegendreTransform<LD>& lt, const RunConfig& config,
                            const std::vector<std::pair<BallGrid, GridField>>& solved) {
  ClaimReport rep{cid("subaffine", c), ClaimStatus::kPass, {}, {}, {}, {}};
  long sampled_total = 0;
  for (int n : config.grid_sizes) {
    const BallGrid grid(n, config.grid_eps);
    const long v = discrete_subaffine_check(grid, sample_field(lt, grid), config.subaffine_trials, config.seed);
    rep.measured.emplace_back("violations_sampled_n=" + std::to_string(n), v);
    sampled_total += v;
  }
  long solved_total = 0;
  for (const auto& [g, f] : solved) {
    const long v = discrete_subaffine_check(g, f, config.subaffine_trials, config.seed);
    rep.measured.emplace_back("violations_solved_n=" + std::to_string(g.n()), v);
    solved_total += v;
  }
  rep.claimed = {{"violations_sampled", 0L}, {"slack", "10 h^2"}};
  if (sampled_total != 0) rep.status = ClaimStatus::kFail;
  if (solved_total != 0) {
    rep.notes = "solved fields are reported for information: the centred stencil is not monotone, so the discrete "
                "solution need not be subaffine";
  }
  return rep;
}

std::vector<ClaimReport> spectral_claims(const RunConfig& config) {
  std::vector<ClaimReport> out;
  std::mt19937_64 rng(config.seed + 3);

  // Closed-form graph Hessian against second differences of lambda3_graph.
  {
    std::uniform_real_distribution<double> l(-3, 3), hh(-2, 2);
    double worst = 0.0;
    int checked = 0;
    while (checked < 1000) {
      const double l1 = l(rng), l2 = l(rng);
      const Convention conv{hh(rng)};
      if (std::abs(l1 * l2 - 1 + conv.h * (l1 + l2)) < 0.5) continue;
      const GraphHessian g = lambda3_graph_hessian(l1, l2, conv);
      auto f = [&](double a, double b) { return lambda3_graph(a, b, conv); };
      const double s = 1e-4, f0 = f(l1, l2);
      const double d11 = (f(l1 + s, l2) - 2 * f0 + f(l1 - s, l2)) / (s * s);
      const double d22 = (f(l1, l2 + s) - 2 * f0 + f(l1, l2 - s)) / (s * s);
      const double d12 = (f(l1 + s, l2 + s) - f(l1 + s, l2 - s) - f(l1 - s, l2 + s) + f(l1 - s, l2 - s)) / (4 * s * s);
      const double scale = std::max({std::abs(g.d11), std::abs(g.d22), std::abs(g.d12)});
      worst = std::max({worst, std::abs(d11 - g.d11) / scale, std::abs(d22 - g.d22) / scale,
                        std::abs(d12 - g.d12) / scale});
      ++checked;
    }
    ClaimReport r{"graph-hessian-fd", worst < 1e-6 ? ClaimStatus::kPass : ClaimStatus::kFail, {}, {}, {}, {}};
    r.measured = {{"points", 1000L}, {"max_relative_error", worst}};
    r.claimed = {{"max_relative_error", 1e-6}};
    out.push_back(r);
  }
  // Saddle of the middle component at l1 = l2 = -c - 1/10, c = 0 (h = 0 here).
  {
    const Convention conv{0.0};
    const double l = -0.1;
    const GraphHessian g = lambda3_graph_hessian(l, l, conv);
    const Branch b = classify_branch({l, l, lambda3_graph(l, l, conv)}, conv);
    ClaimReport r{"middle-branch-saddle", g.det2 < 0 && b == Branch::kC2 ? ClaimStatus::kPass : ClaimStatus::kFail,
                  {}, {}, {}, {}};
    r.measured = {{"det2", g.det2}, {"branch_label", static_cast<long>(b)}};
    r.claimed = {{"det2_sign", "negative"}, {"branch_label", 2L}};
    out.push_back(r);
  }
  // Dual of the dual: s in F~^i exactly when -s is outside the interior of F^i.
  {
    std::cauchy_distribution<double> l(0, 2);
    std::uniform_real_distribution<double> hh(-3, 3);
    long violations = 0;
    const long n = 1000000;
    for (long t = 0; t < n; ++t) {
      const SpecTriple s(l(rng), l(rng), l(rng));
      const Convention conv{hh(rng)};
      const int i = 1 + static_cast<int>(t % 3);
      if (dual_membership(s, conv, i, true) != (arctan_sum(s.negated()) < conv.theta_branch(i))) ++violations;
    }
    ClaimReport r{"duality-involution", violations == 0 ? ClaimStatus::kPass : ClaimStatus::kFail, {}, {}, {}, {}};
    r.measured = {{"triples", n}, {"violations", violations}};
    r.claimed = {{"violations", 0L}};
    out.push_back(r);
  }
  // Ellipticity gap: positive everywhere, decreasing to 0 as an eigenvalue grows.
  {
    std::cauchy_distribution<double> l(0, 5);
    long nonpositive = 0;
    for (int t = 0; t < 100000; ++t) {
      const double g = ellipticity_gap({l(rng), l(rng), l(rng)});
      if (!(g > 0 && g <= 1)) ++nonpositive;
    }
    bool decreasing = true;
    double prev = 2.0;
    for (double t = 1; t <= 1e6; t *= 1.5) {
      const double g = ellipticity_gap({t, 0, 0});
      decreasing = decreasing && g > 0 && g < prev;
      prev = g;
    }
    ClaimReport r{"ellipticity-gap", nonpositive == 0 && decreasing && prev < 1e-11 ? ClaimStatus::kPass
                                                                                 : ClaimStatus::kFail,
                  {}, {}, {}, {}};
    r.measured = {{"out_of_range", nonpositive}, {"decreasing", decreasing ? "yes" : "no"}, {"gap_at_1e6", prev}};
    r.claimed = {{"out_of_range", 0L}, {"limit", 0.0}};
    out.push_back(r);
  }
  return out;
}

Coeff c_for_theta(double theta) {
  if (!(std::abs(theta) < std::numbers::pi / 2 - 1e-3)) {
    throw Error(ErrorCode::kBadConfig, "theta must lie in (-pi/2, pi/2), got " + fmt(theta));
  }
  if (theta == 0.0) return Coeff(0);
  return rational_near(1.0 / std::tan(theta));
}

std::vector<ClaimReport> pipeline_claims(double theta, const RunConfig& config, Artifacts* artifacts) {
  const Coeff c = c_for_theta(theta);
  std::vector<ClaimReport> out;
  auto stage = [&](const std::string& name, auto&& body) { run_stage(out, cid(name + "-error", c), body); };
  ClaimReport choice{"pipeline-parameter", ClaimStatus::kPass, {}, {}, {}, {}};
  choice.measured = {{"theta", theta}, {"c", c.get_str()}};
  choice.notes = theta == 0.0 ? "theta = 0 uses the c = 0 seed" : "c = cot(theta) as a nearby rational";
  out.push_back(choice);

  stage("seed", [&] { out.push_back(seed_residual_claim(c, artifacts)); });
  Jet u;
  stage("series", [&] {
    out.push_back(series_claim(c, config.jet_degree, artifacts));
    u = solved_jet(c, config.jet_degree);
  });
  if (u.degree() < 4) return out;
  const LegendreTransform<LD> lt(u, {.radius = LD(config.working_radius)});
  const double fold = static_cast<double>(
      fold_radius(lt.gradient_map(), LD(config.working_radius), fibonacci_sphere(400)));
  stage("involution", [&] { out.push_back(involution_claim(c, lt, std::min(fold, config.working_radius), config, artifacts)); });
  stage("injectivity", [&] { out.push_back(injectivity_claim(c, lt, std::min(fold, config.working_radius), config)); });
  stage("branch", [&] {
    for (auto& r : branch_claims(c, lt, branch_settings(config, fold), config)) out.push_back(std::move(r));
  });
  stage("regularity", [&] {
    for (auto& r : regularity_claims(c, u, lt, config, artifacts)) out.push_back(std::move(r));
  });
  stage("grid-residual", [&] { out.push_back(grid_residual_claim(c, lt, config, artifacts)); });
  std::vector<std::pair<BallGrid, GridField>> solved;
  stage("dirichlet", [&] { out.push_back(dirichlet_claim(c, lt, config, artifacts, &solved)); });
  stage("subaffine", [&] { out.push_back(subaffine_claim(c, lt, config, solved)); });
  return out;
}

}  // namespace sle
