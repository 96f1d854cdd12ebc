#pragma once

#include "fraclp/grid.hpp"

#include <Eigen/Dense>

namespace fraclp {

enum class OperatorKind { spectral, integral };

/// Discrete realization of a fractional Sobolev inner product on a grid.
///
/// Writing A for the symmetric positive definite matrix with
/// u.A.v = <u,v>_V and M = cell_weight * I for the lumped mass matrix:
///
///  - spectral kind: A = w_cell * S diag((lambda_k^h)^s) S with S the
///    orthonormal discrete sine transform and lambda_k^h the eigenvalues of
///    the 3-point discrete Dirichlet Laplacian (tensor sums in 2-D). This is
///    the matrix power of the discrete Laplacian, so it is exactly
///    diagonalized by S at every mesh size.
///  - integral kind: A = (Gagliardo P1 stiffness of the whole-space form,
///    zero extension outside the domain) + M. 1-D only.
///
/// Operators are immutable after construction; all methods are const and
/// reentrant.
class FracOperator {
 public:
  OperatorKind kind() const { return kind_; }
  double order() const { return s_; }
  const Grid& grid() const { return grid_; }

  /// V-Riesz image under the lumped L2 product:
  /// <apply(u), v>_{L2,lumped} = <u,v>_V for all v. Equals M^{-1} A u.
  GridFunction apply(const GridFunction& u) const;

  /// <u,v>_V = v.(A u).
  double inner(const GridFunction& u, const GridFunction& v) const;
  double norm(const GridFunction& u) const;

  /// Solves (c A + M diag(w)) x = rhs by Jacobi-preconditioned CG.
  /// Requires c > 0 and w >= 0 nodally; the system is SPD by construction.
  /// max_iter = 0 selects the default cap of 10 * n iterations. Throws
  /// std::runtime_error carrying the last residual on non-convergence.
  GridFunction solve_shifted(double c, const GridFunction& w,
                             const GridFunction& rhs, double tol = 1e-10,
                             int max_iter = 0) const;

  /// Dense A (the V-inner-product matrix). O(n^2) storage; intended for
  /// debug dumps and small-n oracles.
  Eigen::MatrixXd dense_matrix() const;

  /// Smallest V-vs-L2 coercivity ratio available in closed form:
  /// (lambda_1^h)^s for the spectral kind, 1 for the integral kind (the
  /// lumped mass term is part of A there).
  double coercivity_lower_bound() const;

  friend FracOperator spectral_operator(const Grid& grid, double s);
  friend FracOperator integral_stiffness(const Grid& grid, double s, int max_n);

 private:
  FracOperator() = default;

  GridFunction system_matvec(double c, const GridFunction& w,
                             const GridFunction& v) const;

  OperatorKind kind_ = OperatorKind::spectral;
  double s_ = 0.5;
  Grid grid_;

  // spectral data: per-axis sine transforms, eigenvalue powers (n1 x n2
  // matrix, second axis trivial in 1-D), and the diagonal of S Lambda S
  Eigen::MatrixXd sine1_, sine2_;
  Eigen::MatrixXd eig_pow_;
  Eigen::VectorXd apply_diag_;
  double lambda1_pow_ = 0.0;

  // integral data: dense A including the lumped mass term
  Eigen::MatrixXd dense_;
};

/// Spectral fractional Laplacian, s in (0,1]. s = 1 reproduces the plain
/// discrete Laplacian and exists as a testing hook; production configs keep
/// s in (0,1).
FracOperator spectral_operator(const Grid& grid, double s);

/// P1 Galerkin matrix of the whole-space Gagliardo inner product of order
/// s in (0,1), functions extended by zero, plus the lumped L2 term.
/// Dense assembly; refuses grids larger than max_n nodes.
FracOperator integral_stiffness(const Grid& grid, double s, int max_n = 512);

}  // namespace fraclp
