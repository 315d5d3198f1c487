#pragma once

// Legendre transform of a jet potential u on a ball around the origin:
//   u~(q) = <q, p> - u(p),  grad u(p) = q.
// The gradient map folds cubically along the z-axis at the origin (its third
// component is -4 m z^3 + ... there), so inversion uses damped Newton seeded
// from a forward lattice, with bisection on the axis itself.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "sle/error.hpp"
#include "sle/jet.hpp"
#include "sle/polynomial.hpp"
#include "sle/spectral.hpp"

namespace sle {

/// m_c = 1 / ((c+1)(c^2+2c+2)(c^2+c+1)(c^2+1)), with m_{-1} = 1/2 and m_0 = 1/3.
Coeff axis_cubic_closed_form(const Coeff& c);

template <typename Scalar = long double>
class GradientMap {
 public:
  using Vec = Vec3<Scalar>;
  using Mat = Mat3<Scalar>;

  explicit GradientMap(const Jet& u)
      : u_(u),
        components_{diff(u, Var::kX), diff(u, Var::kY), diff(u, Var::kZ)},
        m_(-components_[2].coeff({0, 0, 3}) / 4),
        poly_(u) {
    if (u.degree() < 2) throw Error(ErrorCode::kDegreeTooLow, "gradient map needs a jet of degree >= 2");
    axis_invariant_ = true;
    for (int i = 0; i < 2; ++i)
      for (const auto& [e, c] : components_[i].terms())
        if (e.x == 0 && e.y == 0) axis_invariant_ = false;
    axis_coeffs_.assign(components_[2].degree() + 1, Scalar(0));
    axis_slope_coeffs_.assign(components_[2].degree() + 1, Scalar(0));
    for (const auto& [e, c] : components_[2].terms()) {
      if (e.x == 0 && e.y == 0) {
        axis_coeffs_[e.z] = to_scalar<Scalar>(c);
        if (e.z > 0) axis_slope_coeffs_[e.z - 1] = to_scalar<Scalar>(c) * Scalar(e.z);
      }
    }
  }

  const Jet& potential_jet() const { return u_; }
  const std::array<Jet, 3>& components() const { return components_; }
  /// Axis cubic coefficient m, read off as -(z^3 coefficient of u_z) / 4.
  const Coeff& axis_cubic() const { return m_; }
  const Polynomial<Scalar>& potential() const { return poly_; }

  Vec operator()(const Vec& p) const { return poly_.gradient(p); }
  Mat jacobian(const Vec& p) const { return poly_.hessian(p); }

  /// True when u_x and u_y vanish identically on the z-axis, so that the axis
  /// maps into the w-axis.
  bool axis_invariant() const { return axis_invariant_; }

  /// u_z(0, 0, z) and its z-derivative.
  Scalar axis_component(Scalar z) const { return horner(axis_coeffs_, z); }
  Scalar axis_slope(Scalar z) const { return horner(axis_slope_coeffs_, z); }

 private:
  static Scalar horner(const std::vector<Scalar>& c, Scalar z) {
    Scalar s(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
    return s;
  }

  Jet u_;
  std::array<Jet, 3> components_;
  Coeff m_;
  Polynomial<Scalar> poly_;
  bool axis_invariant_ = false;
  std::vector<Scalar> axis_coeffs_;
  std::vector<Scalar> axis_slope_coeffs_;
};

template <typename Scalar>
struct InversionResult {
  Vec3<Scalar> p = Vec3<Scalar>::Zero();
  Scalar residual = std::numeric_limits<Scalar>::infinity();
  int iterations = 0;
  bool converged = false;
  bool in_domain = false;
};

template <typename Scalar>
struct LegendreSample {
  Vec3<Scalar> q;
  Vec3<Scalar> p;
  Scalar value;
  Scalar defect;
};

template <typename Scalar = long double>
class LegendreTransform {
 public:
  using Vec = Vec3<Scalar>;
  using Mat = Mat3<Scalar>;

  struct Options {
    Scalar radius = Scalar(0.1);   // working ball in p-space
    int lattice = 33;              // forward-sweep nodes per axis
    Scalar tolerance = Scalar(1e-12);  // relative to max(|q|, |grad u| scale)
    int max_iterations = 80;
  };

  explicit LegendreTransform(const Jet& u) : LegendreTransform(u, Options{}) {}
  LegendreTransform(const Jet& u, Options options) : map_(u), opt_(options) {
    b_ = map_(Vec::Zero());
    build_lattice();
  }

  const GradientMap<Scalar>& gradient_map() const { return map_; }
  const Options& options() const { return opt_; }
  Scalar radius() const { return opt_.radius; }
  /// Image of the origin, where the transform is singular.
  const Vec& singular_image() const { return b_; }

  InversionResult<Scalar> try_invert(const Vec& q, const Vec* seed = nullptr) const {
    InversionResult<Scalar> best;
    if (map_.axis_invariant() && q(0) == Scalar(0) && q(1) == Scalar(0) && b_.isZero()) {
      best = invert_on_axis(q(2));
      if (best.converged) return best;
    }
    InversionResult<Scalar> last;
    auto attempt = [&](const Vec& start) {
      last = newton(q, start);
      if (last.converged && last.in_domain) return true;
      if (last.residual < best.residual) best = last;
      return false;
    };
    if (seed && attempt(*seed)) return last;
    if (attempt(axis_guess(q))) return last;
    if (attempt(nearest_seed(q))) return last;
    return best;
  }

  /// Throws NO_CONVERGENCE or OUT_OF_DOMAIN.
  Vec invert(const Vec& q, const Vec* seed = nullptr) const {
    const InversionResult<Scalar> r = try_invert(q, seed);
    if (!r.converged) {
      throw Error(ErrorCode::kNoConvergence, "gradient inversion failed, residual " +
                                                 std::to_string(static_cast<double>(r.residual)));
    }
    if (!r.in_domain) throw Error(ErrorCode::kOutOfDomain, "preimage leaves the working ball");
    return r.p;
  }

  Scalar value_at(const Vec& q, const Vec& p) const { return q.dot(p) - map_.potential().value(p); }

  Scalar value(const Vec& q, const Vec* seed = nullptr) const { return value_at(q, invert(q, seed)); }

  /// Centered second differences, Richardson-extrapolated over steps (h, h/2, h/4).
  Mat fd_hessian(const Vec& q, Scalar step) const {
    const Vec p0 = invert(q);
    const Mat h0 = map_.jacobian(p0);
    const Eigen::FullPivLU<Mat> lu(h0);
    auto f = [&](const Vec& dq) {
      Vec seed = p0;
      if (lu.isInvertible()) seed += lu.solve(dq);
      return value(q + dq, &seed);
    };
    auto level = [&](Scalar h) {
      Mat m;
      const Scalar f0 = value_at(q, p0);
      for (int i = 0; i < 3; ++i) {
        Vec ei = Vec::Zero();
        ei(i) = h;
        m(i, i) = (f(ei) - Scalar(2) * f0 + f(-ei)) / (h * h);
        for (int j = i + 1; j < 3; ++j) {
          Vec ej = Vec::Zero();
          ej(j) = h;
          m(i, j) = m(j, i) = (f(ei + ej) - f(ei - ej) - f(ej - ei) + f(-ei - ej)) / (Scalar(4) * h * h);
        }
      }
      return m;
    };
    const Mat l1 = level(step), l2 = level(step / Scalar(2)), l4 = level(step / Scalar(4));
    const Mat r1 = (Scalar(4) * l2 - l1) / Scalar(3);
    const Mat r2 = (Scalar(4) * l4 - l2) / Scalar(3);
    return (Scalar(16) * r2 - r1) / Scalar(15);
  }

  /// ||H~(q) H(p) - I||_inf with H~ from fd_hessian. Refuses when the stencil
  /// comes within 10 steps of the singular image.
  Scalar hessian_inverse_defect(const Vec& q, Scalar step) const {
    check_away_from_singular(q, step);
    const Mat ht = fd_hessian(q, step);
    const Mat h = map_.jacobian(invert(q));
    return (ht * h - Mat::Identity()).cwiseAbs().maxCoeff();
  }

  LegendreSample<Scalar> sample(const Vec& q, Scalar step) const {
    const Vec p = invert(q);
    return {q, p, value_at(q, p), hessian_inverse_defect(q, step)};
  }

  void check_away_from_singular(const Vec& q, Scalar step) const {
    if ((q - b_).norm() < Scalar(10) * step) {
      throw Error(ErrorCode::kNearSingularImage, "finite-difference stencil reaches the image of the origin");
    }
  }

  /// Nearest forward-lattice image, in coordinates normalised by the image extent.
  Vec nearest_seed(const Vec& q) const {
    const Eigen::Array3i cell = cell_of(q);
    std::size_t best = 0;
    Scalar best_d = std::numeric_limits<Scalar>::infinity();
    const Vec qn = normalise(q);
    for (int ring = 0; ring < kBuckets; ++ring) {
      for (int i = cell(0) - ring; i <= cell(0) + ring; ++i)
        for (int j = cell(1) - ring; j <= cell(1) + ring; ++j)
          for (int k = cell(2) - ring; k <= cell(2) + ring; ++k) {
            if (std::max({std::abs(i - cell(0)), std::abs(j - cell(1)), std::abs(k - cell(2))}) != ring) continue;
            if (i < 0 || j < 0 || k < 0 || i >= kBuckets || j >= kBuckets || k >= kBuckets) continue;
            for (std::size_t idx : buckets_[bucket_index(i, j, k)]) {
              const Scalar d = (normalise(lattice_q_[idx]) - qn).squaredNorm();
              if (d < best_d) {
                best_d = d;
                best = idx;
              }
            }
          }
      // Every point in a later ring is at least `ring` cells away.
      const Scalar reach = Scalar(ring) / Scalar(kBuckets);
      if (best_d < std::numeric_limits<Scalar>::infinity() && reach * reach > best_d) break;
    }
    return lattice_p_[best];
  }

 private:
  static constexpr int kBuckets = 24;

  InversionResult<Scalar> invert_on_axis(Scalar w) const {
    InversionResult<Scalar> r;
    const Scalar rad = opt_.radius;
    Scalar lo = -rad, hi = rad;
    Scalar flo = map_.axis_component(lo) - w, fhi = map_.axis_component(hi) - w;
    if (flo == Scalar(0) || fhi == Scalar(0)) {
      r.p = Vec(0, 0, flo == Scalar(0) ? lo : hi);
    } else {
      if ((flo > 0) == (fhi > 0)) return r;  // not bracketed on the ball
      for (int it = 0; it < 200 && hi - lo > Scalar(0); ++it) {
        const Scalar mid = (lo + hi) / Scalar(2);
        if (mid == lo || mid == hi) break;
        const Scalar fm = map_.axis_component(mid) - w;
        if (fm == Scalar(0)) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0) == (flo > 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        r.iterations = it + 1;
      }
      r.p = Vec(0, 0, (lo + hi) / Scalar(2));
    }
    r.residual = (map_(r.p) - Vec(0, 0, w)).norm();
    r.in_domain = r.p.norm() <= rad;
    r.converged = r.residual <= tolerance(Vec(0, 0, w));
    return r;
  }

  Scalar tolerance(const Vec& q) const {
    // Absolute floor well below long double noise for |p| ~ 1e-3.
    return opt_.tolerance * std::max(q.norm(), Scalar(1e-9));
  }

  InversionResult<Scalar> newton(const Vec& q, const Vec& start) const {
    InversionResult<Scalar> r;
    r.p = start;
    Vec g;
    Mat h;
    map_.potential().gradient_hessian(r.p, g, h);
    Scalar res = (g - q).norm();
    const Scalar tol = tolerance(q);
    int it = 0;
    for (; it < opt_.max_iterations; ++it) {
      if (!std::isfinite(static_cast<double>(res))) break;
      const Eigen::FullPivLU<Mat> lu(h);
      Vec dp = lu.solve(g - q);
      if (!dp.allFinite()) break;
      Scalar t(1);
      bool accepted = false;
      Vec trial;
      Scalar trial_res = res;
      for (int ls = 0; ls < 40; ++ls) {
        trial = r.p - t * dp;
        trial_res = (map_(trial) - q).norm();
        if (trial_res < (Scalar(1) - Scalar(1e-4) * t) * res) {
          accepted = true;
          break;
        }
        t /= Scalar(2);
      }
      if (!accepted) break;  // at the rounding floor
      r.p = trial;
      res = trial_res;
      map_.potential().gradient_hessian(r.p, g, h);
      res = (g - q).norm();
      // Two extra iterations past the tolerance buy the last digits.
      if (res <= tol * Scalar(1e-3)) {
        ++it;
        break;
      }
    }
    r.iterations = it;
    r.residual = res;
    r.converged = res <= tol;
    r.in_domain = r.p.norm() <= opt_.radius;
    return r;
  }

  /// Decoupled first guess: linear in (x, y), axis cubic in z.
  Vec axis_guess(const Vec& q) const {
    const Mat h0 = map_.jacobian(Vec::Zero());
    Vec p = Vec::Zero();
    if (h0(0, 0) != Scalar(0)) p(0) = (q(0) - b_(0)) / h0(0, 0);
    if (h0(1, 1) != Scalar(0)) p(1) = (q(1) - b_(1)) / h0(1, 1);
    const Scalar w = q(2) - (map_(Vec(p(0), p(1), 0))(2) - map_.axis_component(0));
    const InversionResult<Scalar> axis = invert_on_axis(w);
    p(2) = axis.p(2);
    if (p.isZero()) p(2) = opt_.radius * Scalar(1e-3);
    return p;
  }

  void build_lattice() {
    const int n = std::max(opt_.lattice, 3);
    const Scalar r = opt_.radius;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const Vec p(-r + Scalar(2) * r * i / (n - 1), -r + Scalar(2) * r * j / (n - 1),
                      -r + Scalar(2) * r * k / (n - 1));
          if (p.norm() > r) continue;
          lattice_p_.push_back(p);
          lattice_q_.push_back(map_(p));
        }
    lo_ = lattice_q_.front();
    hi_ = lattice_q_.front();
    for (const Vec& q : lattice_q_) {
      lo_ = lo_.cwiseMin(q);
      hi_ = hi_.cwiseMax(q);
    }
    extent_ = (hi_ - lo_).cwiseMax(Vec::Constant(std::numeric_limits<Scalar>::min()));
    buckets_.assign(kBuckets * kBuckets * kBuckets, {});
    for (std::size_t idx = 0; idx < lattice_q_.size(); ++idx) {
      const Eigen::Array3i c = cell_of(lattice_q_[idx]);
      buckets_[bucket_index(c(0), c(1), c(2))].push_back(idx);
    }
  }

  Vec normalise(const Vec& q) const { return (q - lo_).cwiseQuotient(extent_); }

  Eigen::Array3i cell_of(const Vec& q) const {
    const Vec n = normalise(q) * Scalar(kBuckets);
    Eigen::Array3i c;
    for (int i = 0; i < 3; ++i) {
      const Scalar v = std::floor(n(i));
      c(i) = static_cast<int>(std::clamp<Scalar>(v, Scalar(0), Scalar(kBuckets - 1)));
    }
    return c;
  }

  static std::size_t bucket_index(int i, int j, int k) {
    return (static_cast<std::size_t>(i) * kBuckets + j) * kBuckets + k;
  }

  GradientMap<Scalar> map_;
  Options opt_;
  Vec b_;
  std::vector<Vec, Eigen::aligned_allocator<Vec>> lattice_p_;
  std::vector<Vec, Eigen::aligned_allocator<Vec>> lattice_q_;
  Vec lo_, hi_, extent_;
  std::vector<std::vector<std::size_t>> buckets_;
};

struct InjectivityReport {
  double min_ratio = std::numeric_limits<double>::infinity();
  long collisions = 0;
  long pairs = 0;
};

/// Pair scan of the gradient map on the ball: random pairs plus coordinate
/// reflections of each sample (x -> -x and so on), which is where even
/// potentials would collide. The ratio |grad u(p1) - grad u(p2)| / |p1 - p2|^3
/// is recorded; a ratio below 1e-8 counts as a collision.
template <typename Scalar>
InjectivityReport injectivity_scan(const GradientMap<Scalar>& g, long n_pairs, Scalar radius,
                                   std::uint64_t seed = 1) {
  using Vec = Vec3<Scalar>;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> flips(1, 7);
  auto random_point = [&] {
    Vec p;
    do {
      p = Vec(unit(rng), unit(rng), unit(rng));
    } while (p.norm() > Scalar(1));
    return Vec(p * radius);
  };
  InjectivityReport report;
  for (long t = 0; t < n_pairs; ++t) {
    const Vec p1 = random_point();
    Vec p2;
    if (t % 2 == 0) {
      p2 = random_point();
    } else {
      const int mask = flips(rng);
      p2 = p1;
      for (int i = 0; i < 3; ++i)
        if (mask & (1 << i)) p2(i) = -p2(i);
    }
    const Scalar dp = (p1 - p2).norm();
    if (dp < Scalar(1e-9) * radius) continue;
    const Scalar ratio = (g(p1) - g(p2)).norm() / (dp * dp * dp);
    ++report.pairs;
    report.min_ratio = std::min(report.min_ratio, static_cast<double>(ratio));
    if (ratio < Scalar(1e-8)) ++report.collisions;
  }
  return report;
}

struct BranchReport {
  double theta_mean = 0.0;
  double spread = 0.0;  // max |sum - mean|
  std::vector<double> sums;
  std::vector<std::array<int, 3>> signatures;  // signs of sorted eigenvalues
  bool signature_uniform = true;
};

/// arctan sum of the finite-difference Hessian of u~ at each sample.
template <typename Scalar>
BranchReport transform_branch_constant(const LegendreTransform<Scalar>& lt,
                                       const std::vector<Vec3<Scalar>, Eigen::aligned_allocator<Vec3<Scalar>>>& samples,
                                       Scalar step) {
  BranchReport rep;
  for (const auto& q : samples) {
    lt.check_away_from_singular(q, step);
    const SpecTriple s = eig3(lt.fd_hessian(q, step));
    rep.sums.push_back(arctan_sum(s));
    std::array<int, 3> sig{};
    for (int i = 0; i < 3; ++i) sig[i] = s[i] > 0 ? 1 : (s[i] < 0 ? -1 : 0);
    if (!rep.signatures.empty() && sig != rep.signatures.front()) rep.signature_uniform = false;
    rep.signatures.push_back(sig);
  }
  if (rep.sums.empty()) return rep;
  double total = 0.0;
  for (double v : rep.sums) total += v;
  rep.theta_mean = total / static_cast<double>(rep.sums.size());
  for (double v : rep.sums) rep.spread = std::max(rep.spread, std::abs(v - rep.theta_mean));
  return rep;
}

/// Smallest radius along `directions` where det D^2u changes sign relative to
/// its sign at radius / 100, scanned in steps of radius / 100; `radius` when
/// there is no sign change. Inside it the gradient map has no fold besides the
/// origin's.
template <typename Scalar>
Scalar fold_radius(const GradientMap<Scalar>& g, Scalar radius, const std::vector<Eigen::Vector3d>& directions) {
  const Scalar dr = radius / Scalar(100);
  Scalar fold = radius;
  for (const auto& d : directions) {
    const Vec3<Scalar> u = d.template cast<Scalar>().normalized();
    const Scalar s0 = g.jacobian(u * dr).determinant();
    for (int k = 2; Scalar(k) * dr < fold; ++k) {
      if (g.jacobian(u * (Scalar(k) * dr)).determinant() * s0 <= Scalar(0)) {
        fold = Scalar(k) * dr;
        break;
      }
    }
  }
  return fold;
}

/// Forward images of points with |p| in [r_lo, r_hi] along random directions.
template <typename Scalar>
std::vector<Vec3<Scalar>, Eigen::aligned_allocator<Vec3<Scalar>>> annulus_images(
    const GradientMap<Scalar>& g, int n, Scalar r_lo, Scalar r_hi, std::uint64_t seed,
    std::vector<Vec3<Scalar>, Eigen::aligned_allocator<Vec3<Scalar>>>* preimages = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3<Scalar>, Eigen::aligned_allocator<Vec3<Scalar>>> out;
  for (int i = 0; i < n; ++i) {
    Vec3<Scalar> d(normal(rng), normal(rng), normal(rng));
    d.normalize();
    const Vec3<Scalar> p = d * (r_lo + (r_hi - r_lo) * Scalar(unit(rng)));
    if (preimages) preimages->push_back(p);
    out.push_back(g(p));
  }
  return out;
}

/// Quasi-uniform unit directions; i = 0 and i = n - 1 are the poles.
std::vector<Eigen::Vector3d> fibonacci_sphere(int n);

template <typename Scalar>
struct BoundaryTrace {
  Scalar radius;
  std::vector<Eigen::Vector3d> directions;
  std::vector<Scalar> values;
};

template <typename Scalar>
BoundaryTrace<Scalar> boundary_trace(const LegendreTransform<Scalar>& lt, Scalar radius, int n) {
  BoundaryTrace<Scalar> trace{radius, fibonacci_sphere(n), {}};
  for (const auto& d : trace.directions) {
    const Vec3<Scalar> q = lt.singular_image() + d.template cast<Scalar>() * radius;
    const InversionResult<Scalar> r = lt.try_invert(q);
    if (r.converged && !r.in_domain) throw Error(ErrorCode::kSphereTooBig, "trace sphere leaves the gradient image");
    if (!r.converged) throw Error(ErrorCode::kNoConvergence, "trace inversion failed");
    trace.values.push_back(lt.value_at(q, r.p));
  }
  return trace;
}

template <typename Scalar>
void write_samples_csv(std::ostream& os, const std::vector<LegendreSample<Scalar>>& samples) {
  os << "qu,qv,qw,px,py,pz,value,defect\n" << std::setprecision(17);
  for (const auto& s : samples) {
    os << static_cast<double>(s.q(0)) << ',' << static_cast<double>(s.q(1)) << ',' << static_cast<double>(s.q(2))
       << ',' << static_cast<double>(s.p(0)) << ',' << static_cast<double>(s.p(1)) << ','
       << static_cast<double>(s.p(2)) << ',' << static_cast<double>(s.value) << ','
       << static_cast<double>(s.defect) << '\n';
  }
}

template <typename Scalar>
void write_trace_csv(std::ostream& os, const BoundaryTrace<Scalar>& trace) {
  os << "dx,dy,dz,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < trace.directions.size(); ++i) {
    const auto& d = trace.directions[i];
    os << d.x() << ',' << d.y() << ',' << d.z() << ',' << static_cast<double>(trace.values[i]) << '\n';
  }
}

}  // namespace sle
