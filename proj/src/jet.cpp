#include "sle/jet.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "sle/error.hpp"

namespace sle {

Jet::Jet(int degree) : degree_(std::max(degree, 0)) {}

Jet Jet::constant(int degree, const Coeff& value) {
  Jet j(degree);
  j.set({0, 0, 0}, value);
  return j;
}

Jet Jet::variable(int degree, Var v) {
  Jet j(degree);
  Exponent e;
  if (v == Var::kX) e.x = 1;
  if (v == Var::kY) e.y = 1;
  if (v == Var::kZ) e.z = 1;
  j.set(e, 1);
  return j;
}

Jet Jet::monomial(int degree, Exponent e, const Coeff& value) {
  Jet j(degree);
  j.set(e, value);
  return j;
}

Coeff Jet::coeff(Exponent e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Coeff(0) : it->second;
}

void Jet::set(Exponent e, const Coeff& value) {
  if (e.total() > degree_) return;
  if (value == 0) {
    terms_.erase(e);
  } else {
    terms_[e] = value;
  }
}

void Jet::add_to(Exponent e, const Coeff& value) {
  if (e.total() > degree_ || value == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0) terms_.erase(it);
  }
}

Jet Jet::truncated(int degree) const {
  Jet out(std::min(degree, degree_));
  for (const auto& [e, c] : terms_) {
    if (e.total() <= out.degree_) out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

Jet Jet::homogeneous_part(int total_degree) const {
  Jet out(degree_);
  for (const auto& [e, c] : terms_) {
    if (e.total() == total_degree) out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

int Jet::max_term_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.total());
  return d;
}

int Jet::min_term_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = d < 0 ? e.total() : std::min(d, e.total());
  return d;
}

Jet& Jet::operator+=(const Jet& other) {
  if (other.degree_ < degree_) *this = truncated(other.degree_);
  for (const auto& [e, c] : other.terms_) add_to(e, c);
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  if (other.degree_ < degree_) *this = truncated(other.degree_);
  for (const auto& [e, c] : other.terms_) add_to(e, -c);
  return *this;
}

Jet& Jet::operator*=(const Coeff& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& other) { return *this = *this * other; }

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(std::min(a.degree_, b.degree_));
  const int n = out.degree_;
  Coeff prod;
  for (const auto& [ea, ca] : a.terms_) {
    const int da = ea.total();
    if (da > n) continue;
    for (const auto& [eb, cb] : b.terms_) {
      if (da + eb.total() > n) continue;
      prod = ca * cb;
      out.add_to(ea + eb, prod);
    }
  }
  return out;
}

Jet diff(const Jet& a, Var v) {
  Jet out(a.degree() - 1);
  for (const auto& [e, c] : a.terms()) {
    const int power = e[v];
    if (power == 0) continue;
    Exponent d = e;
    if (v == Var::kX) --d.x;
    if (v == Var::kY) --d.y;
    if (v == Var::kZ) --d.z;
    out.set(d, c * power);
  }
  return out;
}

Jet reciprocal(const Jet& a) {
  const Coeff a0 = a.constant_term();
  if (a0 == 0) throw Error(ErrorCode::kCharacteristic, "reciprocal of a jet with zero constant term");
  // 1/(a0 (1 + e)) = (1/a0) sum_k (-e)^k, and e has no constant term so k <= N suffices.
  Jet neg_e = a * Coeff(-1 / a0);
  neg_e.add_to({0, 0, 0}, 1);
  Jet result = Jet::constant(a.degree(), 1);
  Jet power = Jet::constant(a.degree(), 1);
  for (int k = 1; k <= a.degree(); ++k) {
    power = power * neg_e;
    if (power.is_zero()) break;
    result += power;
  }
  return result * Coeff(1 / a0);
}

Coeff jet_eval_exact(const Jet& a, const std::array<Coeff, 3>& p) {
  const int n = a.degree();
  std::array<std::vector<Coeff>, 3> powers;
  for (int v = 0; v < 3; ++v) {
    powers[v].assign(n + 1, Coeff(1));
    for (int k = 1; k <= n; ++k) powers[v][k] = powers[v][k - 1] * p[v];
  }
  Coeff sum = 0;
  for (const auto& [e, c] : a.terms()) sum += c * powers[0][e.x] * powers[1][e.y] * powers[2][e.z];
  return sum;
}

double jet_eval(const Jet& a, const Eigen::Vector3d& p) {
  // mpq_class(double) is exact for finite doubles.
  return jet_eval_exact(a, {Coeff(p.x()), Coeff(p.y()), Coeff(p.z())}).get_d();
}

const Jet& JetSymMat3::operator()(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == 0 && j == 0) return a11;
  if (i == 1 && j == 1) return a22;
  if (i == 2 && j == 2) return a33;
  if (i == 0 && j == 1) return a12;
  if (i == 0 && j == 2) return a13;
  return a23;
}

Eigen::Matrix3d JetSymMat3::at_origin() const {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j).constant_term().get_d();
  return m;
}

JetSymMat3 hessian(const Jet& u) {
  const Jet ux = diff(u, Var::kX);
  const Jet uy = diff(u, Var::kY);
  const Jet uz = diff(u, Var::kZ);
  return {diff(ux, Var::kX), diff(uy, Var::kY), diff(uz, Var::kZ),
          diff(ux, Var::kY), diff(ux, Var::kZ), diff(uy, Var::kZ)};
}

Jet det_cofactor(const JetSymMat3& m) {
  const Jet minor11 = m.a22 * m.a33 - m.a23 * m.a23;
  const Jet minor12 = m.a12 * m.a33 - m.a23 * m.a13;
  const Jet minor13 = m.a12 * m.a23 - m.a22 * m.a13;
  return m.a11 * minor11 - m.a12 * minor12 + m.a13 * minor13;
}

Jet det_permutation(const JetSymMat3& m) {
  static constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
  Jet sum(m.degree());
  for (std::size_t p = 0; p < kPerms.size(); ++p) {
    const auto& s = kPerms[p];
    Jet term = m(0, s[0]) * m(1, s[1]) * m(2, s[2]);
    if (p < 3) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

CharInvariants char_invariants(const JetSymMat3& m) {
  Jet tr = m.a11 + m.a22 + m.a33;
  Jet s2 = m.a11 * m.a22 + m.a11 * m.a33 + m.a22 * m.a33 - m.a12 * m.a12 - m.a13 * m.a13 -
           m.a23 * m.a23;
  return {std::move(tr), std::move(s2), det_cofactor(m)};
}

std::string to_text(const Jet& a) {
  std::ostringstream os;
  os << "N=" << a.degree() << " vars=x,y,z\n";
  for (const auto& [e, c] : a.terms()) {
    os << e.x << ' ' << e.y << ' ' << e.z << ' ' << c.get_num() << '/' << c.get_den() << '\n';
  }
  return os.str();
}

Jet jet_from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string header;
  if (!std::getline(is, header)) throw Error(ErrorCode::kParse, "empty jet text");
  int degree = -1;
  char vars[32] = {};
  if (std::sscanf(header.c_str(), "N=%d vars=%31s", &degree, vars) != 2 || degree < 0 ||
      std::string(vars) != "x,y,z") {
    throw Error(ErrorCode::kParse, "bad jet header '" + header + "'");
  }
  Jet out(degree);
  std::string line;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Exponent e;
    std::string frac;
    if (!(ls >> e.x >> e.y >> e.z >> frac) || e.x < 0 || e.y < 0 || e.z < 0) {
      throw Error(ErrorCode::kParse, "bad term on line " + std::to_string(line_no));
    }
    if (e.total() > degree) {
      throw Error(ErrorCode::kParse, "term above truncation degree on line " + std::to_string(line_no));
    }
    Coeff c;
    if (c.set_str(frac, 10) != 0 || c.get_den() <= 0) {
      throw Error(ErrorCode::kParse, "bad coefficient on line " + std::to_string(line_no));
    }
    c.canonicalize();
    out.set(e, c);
  }
  return out;
}

}  // namespace sle
