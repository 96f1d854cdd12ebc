#pragma once

#include <Eigen/Core>

#include <array>
#include <string>

namespace fraclp {

/// Nodal values on the interior nodes of a grid. Functions are extended by
/// zero outside the domain (homogeneous Dirichlet convention), so boundary
/// nodes are never stored.
using GridFunction = Eigen::VectorXd;

/// Uniform mesh on an interval (0, L), or a tensor product of two such
/// meshes on a rectangle. Quadrature is mass-lumped: every interior node
/// carries the weight h (1-D) or h1*h2 (2-D).
struct Grid {
  int dim = 1;
  std::array<int, 2> n{0, 0};         // interior node count per axis
  std::array<double, 2> length{0, 0};
  std::array<double, 2> h{0, 0};      // mesh width, length/(n+1)

  int size() const { return dim == 1 ? n[0] : n[0] * n[1]; }
  double cell_weight() const { return dim == 1 ? h[0] : h[0] * h[1]; }

  // total lumped-quadrature weight; smaller than the domain measure because
  // the two boundary half-cells carry no node
  double quad_measure() const { return cell_weight() * size(); }

  // node coordinates; flat index runs x-fastest in 2-D
  double x(int i) const { return (i + 1) * h[0]; }
  double x1(int idx) const { return ((idx % n[0]) + 1) * h[0]; }
  double x2(int idx) const { return ((idx / n[0]) + 1) * h[1]; }
};

Grid make_interval_grid(int n, double length);
Grid make_rectangle_grid(int n1, double length1, int n2, double length2);

/// Throws std::invalid_argument when f does not match the grid size or
/// contains non-finite entries.
void require_match(const Grid& grid, const GridFunction& f);

/// Lumped quadrature: sum_i w_i f_i with w_i = cell_weight.
double integrate(const Grid& grid, const GridFunction& f);

/// integral of |u|^p, 0 < p < 1. Zero exactly when u vanishes at every node.
double lp_pseudonorm(const Grid& grid, const GridFunction& u, double p);

/// CSV serialization: header plus one row per node, "x,value" (1-D) or
/// "x,y,value" (2-D), node-index order, 17 significant digits.
void write_grid_function_csv(const std::string& path, const Grid& grid,
                             const GridFunction& f);
GridFunction read_grid_function_csv(const std::string& path, const Grid& grid);

/// Fixed-width float formatting used by all CSV output (%.17g).
std::string format_double(double v);

}  // namespace fraclp
