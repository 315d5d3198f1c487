#include "sle/seeds.hpp"

#include <map>
#include <mutex>

#include "sle/error.hpp"

namespace sle {
namespace {

struct Term {
  Exponent e;
  Coeff c;
};

Jet from_terms(int degree, const std::vector<Term>& terms) {
  Jet j(degree);
  for (const auto& t : terms) j.add_to(t.e, t.c);
  return j;
}

Coeff q(long num, long den = 1) {
  Coeff r(num, den);
  r.canonicalize();
  return r;
}

Jet seed_v0(int degree) {
  return from_terms(degree, {{{0, 4, 0}, q(-1, 3)},
                             {{0, 2, 2}, q(5)},
                             {{4, 0, 0}, q(-1)},
                             {{2, 0, 2}, q(7)},
                             {{0, 0, 4}, q(-1, 3)},
                             {{0, 2, 1}, q(2)},
                             {{2, 0, 1}, q(-2)},
                             {{0, 2, 0}, q(1, 2)},
                             {{2, 0, 0}, q(1, 2)}});
}

Jet seed_vm1(int degree) {
  return from_terms(degree, {{{2, 2, 0}, q(48)},
                             {{0, 2, 2}, q(-12)},
                             {{4, 0, 0}, q(-119, 2)},
                             {{2, 0, 2}, q(93)},
                             {{0, 0, 4}, q(1, 2)},
                             {{0, 2, 1}, q(2)},
                             {{2, 0, 1}, q(-9)},
                             {{0, 2, 0}, q(-1, 6)},
                             {{2, 0, 0}, q(1)}});
}

// The quartic x^4 / y^4 coefficients are printed with two different
// denominators: (c+1)(c^2+c+1) in the polynomial and 3(c+1)(c^2+c+1) in its
// Cauchy data. Each candidate is a pair of divisors for (y^4, x^4).
struct QuarticCandidate {
  const char* name;
  long y4_divisor;
  long x4_divisor;
};

constexpr QuarticCandidate kQuarticCandidates[] = {
    {"printed-polynomial", 1, 1},
    {"y4-over-3", 3, 1},
    {"cauchy-display (x4,y4 over 3)", 3, 3},
};

Jet seed_vc(const Coeff& c, int degree, const QuarticCandidate& cand) {
  const Coeff c2 = c * c;
  const Coeff a = c + 1;            // c + 1
  const Coeff b = c2 + c + 1;       // c^2 + c + 1
  const Coeff d = c2 + 2 * c + 2;   // c^2 + 2c + 2
  const Coeff e = c2 + 1;           // c^2 + 1
  const Coeff ab = a * b;
  const Coeff c3 = c2 * c, c4 = c2 * c2, c5 = c4 * c;

  Jet j(degree);
  j.add_to({0, 0, 4}, Coeff(-1 / (a * d * b * e)));
  j.add_to({0, 2, 2}, Coeff(2 * (4 * c5 + 4 * c4 + 8 * c3 + 5 * c2 + 4 * c + 4) / ab));
  j.add_to({2, 0, 2}, Coeff(2 * (4 * c2 + 4 * c + 3) / ab));
  j.add_to({0, 4, 0}, Coeff(e * (3 * c4 + 2 * c3 + 2 * c2 - 4 * c - 4) / (ab * cand.y4_divisor)));
  j.add_to({4, 0, 0}, Coeff(-(3 * c2 + 2 * c + 2) / (ab * cand.x4_divisor)));
  j.add_to({0, 2, 1}, Coeff(-2 * e));
  j.add_to({2, 0, 1}, Coeff(2));
  j.add_to({0, 2, 0}, Coeff(b / 2));
  j.add_to({2, 0, 0}, Coeff(a / 2));
  return j;
}

bool residual_vanishes_through(const Jet& r, int degree) {
  const int lowest = r.min_term_degree();
  return lowest < 0 || lowest > degree;
}

struct CachedChoice {
  std::size_t candidate;
  std::vector<std::string> rejected;
};

std::mutex g_cache_mutex;
std::map<Coeff, CachedChoice> g_vc_cache;

CachedChoice resolve_vc(const Coeff& c) {
  {
    std::lock_guard lock(g_cache_mutex);
    if (auto it = g_vc_cache.find(c); it != g_vc_cache.end()) return it->second;
  }
  CachedChoice choice{std::size(kQuarticCandidates), {}};
  for (std::size_t i = 0; i < std::size(kQuarticCandidates); ++i) {
    // Degree 6 holds the full residual of a quartic, so nothing is lost to truncation.
    const Jet r = equation_residual(c, seed_vc(c, 8, kQuarticCandidates[i]));
    if (residual_vanishes_through(r, 2)) {
      choice.candidate = i;
      break;
    }
    choice.rejected.push_back(std::string(kQuarticCandidates[i].name) +
                              ": residual has a nonzero term of degree " +
                              std::to_string(r.min_term_degree()));
  }
  if (choice.candidate == std::size(kQuarticCandidates)) {
    throw Error(ErrorCode::kBadC, "no quartic coefficient candidate satisfies the residual identity at c = " +
                                      c.get_str());
  }
  std::lock_guard lock(g_cache_mutex);
  g_vc_cache.emplace(c, choice);
  return choice;
}

}  // namespace

std::string to_string(SeedVariant v) {
  switch (v) {
    case SeedVariant::kV0: return "v0";
    case SeedVariant::kVc: return "vc";
    case SeedVariant::kVm1: return "vm1";
  }
  return "?";
}

SeedSpec SeedSpec::for_c(const Coeff& c) {
  if (c == 0) return {c, SeedVariant::kV0};
  if (c == -1) return {c, SeedVariant::kVm1};
  return {c, SeedVariant::kVc};
}

SeedResult seed_polynomial(const SeedSpec& spec, int degree) {
  if (degree < 4) throw Error(ErrorCode::kDegreeTooLow, "seed polynomials have degree 4");
  switch (spec.variant) {
    case SeedVariant::kV0:
      if (spec.c != 0) throw Error(ErrorCode::kBadC, "variant v0 requires c = 0");
      return {seed_v0(degree), "printed", {}};
    case SeedVariant::kVm1:
      if (spec.c != -1) throw Error(ErrorCode::kBadC, "variant vm1 requires c = -1");
      return {seed_vm1(degree), "printed", {}};
    case SeedVariant::kVc: {
      if (spec.c == -1) throw Error(ErrorCode::kBadC, "vc has a vanishing denominator at c = -1; use vm1");
      if (spec.c == 0) throw Error(ErrorCode::kBadC, "vc is not defined for c = 0; use v0");
      const CachedChoice choice = resolve_vc(spec.c);
      return {seed_vc(spec.c, degree, kQuarticCandidates[choice.candidate]),
              kQuarticCandidates[choice.candidate].name, choice.rejected};
    }
  }
  throw Error(ErrorCode::kBadC, "unknown seed variant");
}

Jet equation_residual(const Coeff& c, const Jet& u) {
  if (u.degree() < 2) throw Error(ErrorCode::kDegreeTooLow, "residual needs a jet of degree >= 2");
  const CharInvariants inv = char_invariants(hessian(u));
  Jet r = inv.sigma2 + c * (inv.det - inv.trace);
  r.add_to({0, 0, 0}, -1);
  return r;
}

namespace {

Jet noncharacteristic_unchecked(const Coeff& c, const JetSymMat3& h) {
  Jet d = h.a11 + h.a22 + c * (h.a11 * h.a22 - h.a12 * h.a12);
  d.add_to({0, 0, 0}, -c);
  return d;
}

}  // namespace

Jet noncharacteristic_coefficient(const Coeff& c, const Jet& u) {
  if (u.degree() < 2) throw Error(ErrorCode::kDegreeTooLow, "need a jet of degree >= 2");
  Jet d = noncharacteristic_unchecked(c, hessian(u));
  if (d.constant_term() == 0) {
    throw Error(ErrorCode::kCharacteristic, "the plane z = 0 is characteristic at the origin");
  }
  return d;
}

CauchyData cauchy_data_of(const Jet& u) {
  CauchyData data{Jet(u.degree()), Jet(std::max(u.degree() - 1, 0))};
  for (const auto& [e, coef] : u.terms()) {
    if (e.z == 0) data.trace.set(e, coef);
    if (e.z == 1) data.normal.set({e.x, e.y, 0}, coef);
  }
  return data;
}

Jet cauchy_solve(const Coeff& c, const CauchyData& data, int degree) {
  if (degree < 4) throw Error(ErrorCode::kDegreeTooLow, "cauchy_solve needs degree >= 4");
  Jet u(degree);
  for (const auto& [e, coef] : data.trace.terms()) {
    if (e.z != 0) throw Error(ErrorCode::kParse, "Cauchy trace must not depend on z");
    u.set(e, coef);
  }
  for (const auto& [e, coef] : data.normal.terms()) {
    if (e.z != 0) throw Error(ErrorCode::kParse, "Cauchy normal data must not depend on z");
    u.set({e.x, e.y, 1}, coef);
  }
  // Throws CHARACTERISTIC before any work if the recursion cannot start.
  noncharacteristic_coefficient(c, u.truncated(2));

  for (int k = 0; k + 2 <= degree; ++k) {
    const JetSymMat3 h = hessian(u);
    const Jet d = noncharacteristic_unchecked(c, h);
    // Everything in sigma2 + c(det - tr) - 1 that does not multiply u_zz.
    const Jet& a = h.a11;
    const Jet& b = h.a12;
    const Jet& dd = h.a13;
    const Jet& cc = h.a22;
    const Jet& e = h.a23;
    Jet r = a * cc - b * b - dd * dd - e * e +
            c * (Coeff(2) * (b * dd * e) - a * (e * e) - cc * (dd * dd) - a - cc);
    r.add_to({0, 0, 0}, -1);
    const Jet uzz = -(r * reciprocal(d));
    const Coeff norm = (k + 2) * (k + 1);
    for (const auto& [ex, coef] : uzz.terms()) {
      if (ex.z == k) u.set({ex.x, ex.y, k + 2}, coef / norm);
    }
  }
  return u;
}

}  // namespace sle
