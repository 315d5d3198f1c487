#include "sle/dirichlet.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "sle/spectral.hpp"

namespace sle {
namespace {

using Triplet = Eigen::Triplet<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Face and edge neighbours: the 19-point stencil minus its centre.
const std::vector<Eigen::Vector3i>& stencil_offsets() {
  static const std::vector<Eigen::Vector3i> offsets = [] {
    std::vector<Eigen::Vector3i> o;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          const int nz = (a != 0) + (b != 0) + (c != 0);
          if (nz == 1 || nz == 2) o.emplace_back(a, b, c);
        }
    return o;
  }();
  return offsets;
}

Eigen::Vector3i unit(int axis, int sign) {
  Eigen::Vector3i e = Eigen::Vector3i::Zero();
  e(axis) = sign;
  return e;
}

struct Stencil {
  const BallGrid& grid;
  std::size_t at(const Eigen::Vector3i& p) const { return grid.index(p(0), p(1), p(2)); }
};

std::vector<long> interior_numbering(const BallGrid& grid, std::size_t& count) {
  std::vector<long> number(grid.size(), -1);
  count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.kind(i) == NodeKind::kInterior) number[i] = static_cast<long>(count++);
  return number;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

BallGrid::BallGrid(int n, double eps) : n_(n), eps_(eps) {
  if (n < 3 || n % 2 == 0) throw Error(ErrorCode::kBadConfig, "grid size n must be odd and >= 3");
  if (!(eps > 0.0)) throw Error(ErrorCode::kBadConfig, "grid radius must be positive");
  h_ = 2.0 * eps / (n - 1);
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<bool> inside(total);
  for (std::size_t idx = 0; idx < total; ++idx) inside[idx] = position(idx).norm() <= eps * (1.0 + 1e-12);
  kinds_.assign(total, NodeKind::kExterior);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!inside[idx]) continue;
    const Eigen::Vector3i p = ijk(idx);
    bool complete = true;
    for (const auto& o : stencil_offsets()) {
      const Eigen::Vector3i q = p + o;
      if ((q.array() < 0).any() || (q.array() >= n).any() || !inside[index(q(0), q(1), q(2))]) {
        complete = false;
        break;
      }
    }
    kinds_[idx] = complete ? NodeKind::kInterior : NodeKind::kBoundary;
  }
}

Eigen::Vector3i BallGrid::ijk(std::size_t idx) const {
  const int k = static_cast<int>(idx % n_);
  const int j = static_cast<int>((idx / n_) % n_);
  const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
  return {i, j, k};
}

Eigen::Vector3d BallGrid::position(std::size_t idx) const {
  // Symmetric around the centre node so that the origin is exact.
  const int c = (n_ - 1) / 2;
  const Eigen::Vector3i p = ijk(idx);
  return Eigen::Vector3d(p(0) - c, p(1) - c, p(2) - c) * h_;
}

std::size_t BallGrid::count(NodeKind k) const { return std::count(kinds_.begin(), kinds_.end(), k); }

GridField sample_field(const BallGrid& grid, const std::function<double(const Eigen::Vector3d&)>& f) {
  GridField out{std::vector<double>(grid.size(), kNaN), std::vector<bool>(grid.size(), false)};
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.kind(idx) == NodeKind::kExterior) continue;
    const Eigen::Vector3d x = grid.position(idx);
    try {
      out.values[idx] = f(x);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << std::setprecision(17) << e.what() << " at node (" << x(0) << ", " << x(1) << ", " << x(2) << ")";
      throw Error(e.code(), msg.str());
    }
  }
  return out;
}

GridField sample_field(const LegendreTransform<long double>& lt, const BallGrid& grid) {
  const Vec3<long double> b = lt.singular_image();
  return sample_field(grid, [&](const Eigen::Vector3d& x) {
    return static_cast<double>(lt.value(b + x.cast<long double>()));
  });
}

Eigen::Matrix3d grid_hessian(const BallGrid& grid, const GridField& f, std::size_t idx) {
  const Stencil s{grid};
  const Eigen::Vector3i p = grid.ijk(idx);
  const double h2 = grid.h() * grid.h();
  const double u0 = f.values[idx];
  Eigen::Matrix3d hess;
  for (int a = 0; a < 3; ++a) {
    hess(a, a) = (f.values[s.at(p + unit(a, 1))] - 2.0 * u0 + f.values[s.at(p + unit(a, -1))]) / h2;
    for (int b = a + 1; b < 3; ++b) {
      const double v = f.values[s.at(p + unit(a, 1) + unit(b, 1))] - f.values[s.at(p + unit(a, 1) + unit(b, -1))] -
                       f.values[s.at(p + unit(a, -1) + unit(b, 1))] + f.values[s.at(p + unit(a, -1) + unit(b, -1))];
      hess(a, b) = hess(b, a) = v / (4.0 * h2);
    }
  }
  return hess;
}

ResidualReport fd_arctan_residual(const BallGrid& grid, const GridField& f, double theta, double rho) {
  if (rho < 3.0 * grid.h() * (1.0 - 1e-12)) throw Error(ErrorCode::kBadConfig, "exclusion radius must be >= 3h");
  ResidualReport rep;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.kind(idx) != NodeKind::kInterior || grid.position(idx).norm() <= rho) continue;
    const double res = std::abs(arctan_sum(eig3(grid_hessian(grid, f, idx))) - theta);
    const Eigen::Vector3i p = grid.ijk(idx);
    rep.nodes.push_back({p(0), p(1), p(2), res});
    rep.max_res = std::max(rep.max_res, res);
  }
  return rep;
}

GridField boundary_from_trace(const BallGrid& grid, const std::vector<Eigen::Vector3d>& directions,
                              const std::vector<double>& values) {
  if (directions.size() != values.size() || directions.size() < 3) {
    throw Error(ErrorCode::kBadConfig, "trace needs at least 3 directions with values");
  }
  GridField out{std::vector<double>(grid.size(), kNaN), std::vector<bool>(grid.size(), false)};
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.kind(idx) != NodeKind::kBoundary) continue;
    const Eigen::Vector3d d = grid.position(idx).normalized();
    std::array<std::pair<double, std::size_t>, 3> best;
    best.fill({std::numeric_limits<double>::infinity(), 0});
    for (std::size_t t = 0; t < directions.size(); ++t) {
      const double dist = (directions[t] - d).norm();
      if (dist < best[2].first) {
        best[2] = {dist, t};
        std::sort(best.begin(), best.end());
      }
    }
    double value;
    if (best[0].first == 0.0) {
      value = values[best[0].second];
    } else {
      double wsum = 0.0, acc = 0.0;
      for (const auto& [dist, t] : best) {
        wsum += 1.0 / dist;
        acc += values[t] / dist;
      }
      value = acc / wsum;
    }
    out.values[idx] = value;
    out.pinned[idx] = true;
  }
  return out;
}

GridField harmonic_extension(const BallGrid& grid, const GridField& boundary) {
  std::size_t m = 0;
  const std::vector<long> number = interior_numbering(grid, m);
  const Stencil s{grid};
  std::vector<Triplet> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<long>(m));
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const long row = number[idx];
    if (row < 0) continue;
    trip.emplace_back(row, row, 6.0);
    const Eigen::Vector3i p = grid.ijk(idx);
    for (int a = 0; a < 3; ++a)
      for (int sign : {-1, 1}) {
        const std::size_t nb = s.at(p + unit(a, sign));
        if (number[nb] >= 0) {
          trip.emplace_back(row, number[nb], -1.0);
        } else {
          rhs(row) += boundary.values[nb];
        }
      }
  }
  SparseMatrix lap(static_cast<long>(m), static_cast<long>(m));
  lap.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SparseMatrix> solver(lap);
  const Eigen::VectorXd x = solver.solve(rhs);
  GridField out = boundary;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (number[idx] >= 0) out.values[idx] = x(number[idx]);
    out.pinned[idx] = grid.kind(idx) == NodeKind::kBoundary;
  }
  return out;
}

std::vector<double> grid_operator(const BallGrid& grid, const GridField& f, double theta) {
  std::vector<double> g;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.kind(idx) != NodeKind::kInterior) continue;
    g.push_back(arctan_sum(eig3(grid_hessian(grid, f, idx))) - theta);
  }
  return g;
}

namespace {

// G at one node and its derivative in the centre value.
std::pair<double, double> node_equation(const BallGrid& grid, const GridField& f, std::size_t idx, double theta) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(grid_hessian(grid, f, idx), Eigen::EigenvaluesOnly);
  double g = -theta, trace = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double l = es.eigenvalues()(a);
    g += std::atan(l);
    trace += 1.0 / (1.0 + l * l);
  }
  return {g, -2.0 * trace / (grid.h() * grid.h())};
}

void relax_node(const BallGrid& grid, GridField& f, std::size_t idx, double theta) {
  double& u = f.values[idx];
  const double u0 = u;
  const double g0 = node_equation(grid, f, idx, theta).first;
  if (g0 == 0.0) return;
  // Bracket [lo, hi] with G(lo) > 0 > G(hi), widening by doubling.
  const double dir = g0 > 0.0 ? 1.0 : -1.0;
  double near = u0, step = grid.h() * grid.h();
  double far = u0 + dir * step;
  for (int k = 0; k < 200; ++k) {
    u = far;
    if (node_equation(grid, f, idx, theta).first * dir <= 0.0) break;
    near = far;
    step *= 2.0;
    far = u0 + dir * step;
  }
  double lo = dir > 0 ? near : far, hi = dir > 0 ? far : near;
  double x = near;
  for (int k = 0; k < 100; ++k) {
    u = x;
    const auto [g, dg] = node_equation(grid, f, idx, theta);
    if (std::abs(g) < 1e-14) break;
    (g > 0.0 ? lo : hi) = x;
    double next = x - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
    x = next;
  }
  u = x;
}

}  // namespace

Eigen::SparseMatrix<double> grid_jacobian(const BallGrid& grid, const GridField& f) {
  std::size_t m = 0;
  const std::vector<long> number = interior_numbering(grid, m);
  const Stencil s{grid};
  const double h2 = grid.h() * grid.h();
  std::vector<Triplet> trip;
  trip.reserve(m * 19);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const long row = number[idx];
    if (row < 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(grid_hessian(grid, f, idx));
    const Eigen::Vector3d w = (1.0 + es.eigenvalues().array().square()).inverse();
    const Eigen::Matrix3d dg = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::Vector3i p = grid.ijk(idx);
    auto add = [&](const Eigen::Vector3i& q, double v) {
      const long col = number[s.at(q)];
      if (col >= 0) trip.emplace_back(row, col, v);
    };
    for (int a = 0; a < 3; ++a) {
      add(p, -2.0 * dg(a, a) / h2);
      add(p + unit(a, 1), dg(a, a) / h2);
      add(p + unit(a, -1), dg(a, a) / h2);
      for (int b = a + 1; b < 3; ++b) {
        const double v = dg(a, b) / (2.0 * h2);
        add(p + unit(a, 1) + unit(b, 1), v);
        add(p + unit(a, -1) + unit(b, -1), v);
        add(p + unit(a, 1) + unit(b, -1), -v);
        add(p + unit(a, -1) + unit(b, 1), -v);
      }
    }
  }
  SparseMatrix jac(static_cast<long>(m), static_cast<long>(m));
  jac.setFromTriplets(trip.begin(), trip.end());
  return jac;
}

double relaxation_sweeps(const BallGrid& grid, GridField& f, double theta, int sweeps) {
  if (!(std::abs(theta) < 1.5 * M_PI)) throw Error(ErrorCode::kBadConfig, "theta outside (-3 pi/2, 3 pi/2)");
  for (int s = 0; s < sweeps; ++s)
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
      if (grid.kind(idx) == NodeKind::kInterior) relax_node(grid, f, idx, theta);
  return max_abs(grid_operator(grid, f, theta));
}

GridField zero_knowledge_init(const BallGrid& grid, const GridField& boundary, double theta, int sweeps) {
  GridField f = harmonic_extension(grid, boundary);
  relaxation_sweeps(grid, f, theta, sweeps);
  return f;
}

NewtonResult dirichlet_newton(const BallGrid& grid, const GridField& init, double theta,
                              const NewtonOptions& options) {
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.kind(idx) != NodeKind::kExterior && !std::isfinite(init.values[idx])) {
      throw Error(ErrorCode::kBadConfig, "initial field is not finite");
    }
  }
  std::size_t m = 0;
  const std::vector<long> number = interior_numbering(grid, m);

  NewtonResult result{init, {}};
  for (std::size_t idx = 0; idx < grid.size(); ++idx) result.field.pinned[idx] = grid.kind(idx) == NodeKind::kBoundary;
  GridField& u = result.field;
  std::vector<double> g = grid_operator(grid, u, theta);
  double res = max_abs(g);
  result.stats.history.push_back(res);

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool analysed = false;
  for (int it = 0; it < options.max_iterations && res >= options.tolerance; ++it) {
    const SparseMatrix jac = grid_jacobian(grid, u);
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<long>(m));
    Eigen::VectorXd delta;
    bool solved = false;
    if (options.iterative) {
      Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it_solver;
      it_solver.preconditioner().setDroptol(options.ilu_droptol);
      it_solver.preconditioner().setFillfactor(options.ilu_fill);
      it_solver.setTolerance(1e-12);
      it_solver.setMaxIterations(500);
      it_solver.compute(jac);
      if (it_solver.info() == Eigen::Success) {
        delta = it_solver.solve(rhs);
        solved = it_solver.info() == Eigen::Success && delta.allFinite();
      }
    }
    if (!solved) {
      if (!analysed) {
        lu.analyzePattern(jac);
        analysed = true;
      }
      lu.factorize(jac);
      if (lu.info() != Eigen::Success) {
        result.stats.status = NewtonStatus::kSingularJacobian;
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
          if (number[idx] < 0) continue;
          const double d = std::abs(jac.coeff(number[idx], number[idx]));
          if (d < smallest) {
            smallest = d;
            result.stats.singular_node = static_cast<long>(idx);
          }
        }
        result.stats.final_res = res;
        return result;
      }
      delta = lu.solve(rhs);
    }
    if (!delta.allFinite()) {
      result.stats.status = NewtonStatus::kSingularJacobian;
      result.stats.final_res = res;
      return result;
    }

    double t = 1.0;
    bool accepted = false;
    GridField trial = u;
    std::vector<double> g_trial;
    for (int k = 0; k <= options.max_halvings; ++k, t /= 2.0) {
      for (std::size_t idx = 0; idx < grid.size(); ++idx)
        if (number[idx] >= 0) trial.values[idx] = u.values[idx] + t * delta(number[idx]);
      g_trial = grid_operator(grid, trial, theta);
      const double r = max_abs(g_trial);
      if (r <= (1.0 - 1e-4 * t) * res) {
        accepted = true;
        res = r;
        break;
      }
    }
    if (!accepted) break;
    u = std::move(trial);
    g = std::move(g_trial);
    result.stats.iterations = it + 1;
    result.stats.history.push_back(res);
  }
  result.stats.final_res = res;
  result.stats.status = res < options.tolerance ? NewtonStatus::kConverged : NewtonStatus::kDiverged;
  return result;
}

long discrete_subaffine_check(const BallGrid& grid, const GridField& f, int trials, std::uint64_t seed,
                              double slack_factor) {
  std::vector<std::size_t> candidates;
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
    if (grid.kind(idx) == NodeKind::kInterior) candidates.push_back(idx);
  if (candidates.empty()) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::uniform_int_distribution<int> cells(2, 6);
  std::normal_distribution<double> normal;
  const double h = grid.h();
  const double slack = slack_factor * h * h;
  const int n = grid.n();
  long violations = 0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t centre = candidates[pick(rng)];
    const Eigen::Vector3i c = grid.ijk(centre);
    const int radius = cells(rng);
    const Eigen::Vector3d xc = grid.position(centre);
    auto in_ball = [&](const Eigen::Vector3i& q) {
      if ((q.array() < 0).any() || (q.array() >= n).any()) return false;
      const std::size_t id = grid.index(q(0), q(1), q(2));
      return grid.kind(id) != NodeKind::kExterior && (q - c).squaredNorm() <= radius * radius;
    };
    // Slope near the local gradient, perturbed.
    Eigen::Vector3d slope;
    for (int a = 0; a < 3; ++a) {
      slope(a) = (f.values[grid.index(c(0) + (a == 0), c(1) + (a == 1), c(2) + (a == 2))] -
                  f.values[grid.index(c(0) - (a == 0), c(1) - (a == 1), c(2) - (a == 2))]) /
                 (2.0 * h);
    }
    const double scale = slope.norm() + radius * h;
    for (int a = 0; a < 3; ++a) slope(a) += 0.5 * scale * normal(rng);

    std::vector<std::size_t> inner;
    double offset = -std::numeric_limits<double>::infinity();
    for (int i = c(0) - radius; i <= c(0) + radius; ++i)
      for (int j = c(1) - radius; j <= c(1) + radius; ++j)
        for (int k = c(2) - radius; k <= c(2) + radius; ++k) {
          const Eigen::Vector3i q(i, j, k);
          if (!in_ball(q)) continue;
          bool on_edge = false;
          for (int a = 0; a < 3 && !on_edge; ++a)
            for (int sign : {-1, 1})
              if (!in_ball(q + unit(a, sign))) on_edge = true;
          const std::size_t id = grid.index(i, j, k);
          if (on_edge) {
            offset = std::max(offset, f.values[id] - slope.dot(grid.position(id) - xc));
          } else {
            inner.push_back(id);
          }
        }
    for (std::size_t id : inner) {
      if (f.values[id] > slope.dot(grid.position(id) - xc) + offset + slack) ++violations;
    }
  }
  return violations;
}

double sup_distance(const BallGrid& grid, const GridField& a, const GridField& b, double rho) {
  double d = 0.0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.kind(idx) == NodeKind::kExterior || grid.position(idx).norm() <= rho) continue;
    d = std::max(d, std::abs(a.values[idx] - b.values[idx]));
  }
  return d;
}

void write_field_text(std::ostream& os, const BallGrid& grid, const GridField& f) {
  os << std::setprecision(17) << grid.n() << ' ' << grid.eps() << '\n';
  for (double v : f.values) {
    if (std::isfinite(v)) {
      os << v << '\n';
    } else {
      os << "nan\n";
    }
  }
}

void write_residual_csv(std::ostream& os, const ResidualReport& report) {
  os << "i,j,k,res\n" << std::setprecision(17);
  for (const auto& r : report.nodes) os << r.i << ',' << r.j << ',' << r.k << ',' << r.res << '\n';
}

}  // namespace sle
