#pragma once

// Finite-difference view of arctan l1 + arctan l2 + arctan l3 = theta on a
// ball of radius eps in a regular n^3 grid centred at the origin.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sle/error.hpp"
#include "sle/legendre.hpp"

namespace sle {

enum class NodeKind : std::uint8_t { kExterior, kBoundary, kInterior };

/// Nodes farther than eps from the origin are exterior. A non-exterior node is
/// boundary when any of its 18 Hessian-stencil neighbours is exterior or off
/// the grid, so every interior node has a complete stencil.
class BallGrid {
 public:
  BallGrid(int n, double eps);

  int n() const { return n_; }
  double eps() const { return eps_; }
  double h() const { return h_; }
  std::size_t size() const { return kinds_.size(); }
  std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(i) * n_ + j) * n_ + k; }
  Eigen::Vector3i ijk(std::size_t idx) const;
  Eigen::Vector3d position(std::size_t idx) const;
  NodeKind kind(std::size_t idx) const { return kinds_[idx]; }
  std::size_t count(NodeKind k) const;

 private:
  int n_;
  double eps_;
  double h_;
  std::vector<NodeKind> kinds_;
};

struct GridField {
  std::vector<double> values;  // NaN at exterior nodes
  std::vector<bool> pinned;
};

/// f at every non-exterior node; errors from f are rethrown with the node position.
GridField sample_field(const BallGrid& grid, const std::function<double(const Eigen::Vector3d&)>& f);

/// u~ at every non-exterior node, offset so that the grid origin is the image
/// of the origin.
GridField sample_field(const LegendreTransform<long double>& lt, const BallGrid& grid);

/// Centred 19-point Hessian at an interior node.
Eigen::Matrix3d grid_hessian(const BallGrid& grid, const GridField& f, std::size_t idx);

struct NodeResidual {
  int i, j, k;
  double res;
};

struct ResidualReport {
  double max_res = 0.0;
  std::vector<NodeResidual> nodes;
};

/// |arctan sum - theta| at interior nodes with |node| > rho. Requires rho >= 3h.
ResidualReport fd_arctan_residual(const BallGrid& grid, const GridField& f, double theta, double rho);

/// Boundary values from a trace on the sphere: inverse-distance average of the
/// three nearest trace directions. Boundary nodes are pinned.
GridField boundary_from_trace(const BallGrid& grid, const std::vector<Eigen::Vector3d>& directions,
                              const std::vector<double>& values);

/// Boundary nodes of `f` kept and pinned; interior filled with the discrete
/// harmonic extension.
GridField harmonic_extension(const BallGrid& grid, const GridField& boundary);

struct NewtonOptions {
  int max_iterations = 60;
  double tolerance = 1e-8;
  int max_halvings = 30;
  bool iterative = true;  // BiCGSTAB + ILUT, falling back to sparse LU
  double ilu_droptol = 1e-5;
  int ilu_fill = 10;
};

enum class NewtonStatus { kConverged, kDiverged, kSingularJacobian };

struct NewtonStats {
  NewtonStatus status = NewtonStatus::kDiverged;
  int iterations = 0;
  double final_res = 0.0;
  std::vector<double> history;  // ||G||_inf before the first step and after each accepted step
  long singular_node = -1;
};

struct NewtonResult {
  GridField field;  // best iterate
  NewtonStats stats;
};

/// Damped Newton on G(u) = arctan sum of the grid Hessian - theta at interior
/// nodes, boundary nodes fixed to their values in `init`. The Jacobian uses
/// d(sum arctan l)/dH = (I + H^2)^-1; Armijo damping on ||G||_inf.
NewtonResult dirichlet_newton(const BallGrid& grid, const GridField& init, double theta,
                              const NewtonOptions& options = {});

/// dG/du over interior nodes (rows and columns in node order), from
/// d(sum arctan l)/dH = (I + H^2)^-1 through the 19-point stencil.
Eigen::SparseMatrix<double> grid_jacobian(const BallGrid& grid, const GridField& f);

/// Nonlinear Gauss-Seidel in node order: each interior node is solved for its
/// own equation with its neighbours frozen. Raising the centre value by d shifts
/// every eigenvalue by -2d/h^2, so the node equation is strictly decreasing and
/// has one root for |theta| < 3 pi / 2; it is found by bracketed Newton.
/// Returns ||G||_inf after the last sweep.
double relaxation_sweeps(const BallGrid& grid, GridField& f, double theta, int sweeps);

/// Interior init from boundary data only: harmonic extension followed by
/// relaxation sweeps.
GridField zero_knowledge_init(const BallGrid& grid, const GridField& boundary, double theta, int sweeps = 200);

/// Residual vector G at interior nodes, in node order.
std::vector<double> grid_operator(const BallGrid& grid, const GridField& f, double theta);

/// Random sub-balls and affine functions dominating f on each sub-ball's
/// discrete boundary; counts interior nodes with f > a + slack_factor h^2.
long discrete_subaffine_check(const BallGrid& grid, const GridField& f, int trials, std::uint64_t seed = 1,
                              double slack_factor = 10.0);

/// max |a - b| over non-exterior nodes with |node| > rho.
double sup_distance(const BallGrid& grid, const GridField& a, const GridField& b, double rho);

void write_field_text(std::ostream& os, const BallGrid& grid, const GridField& f);
void write_residual_csv(std::ostream& os, const ResidualReport& report);

}  // namespace sle
