#include "fraclp/frac_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// orthonormal discrete sine transform, S(i,k) = sqrt(2/(n+1)) sin((i+1)(k+1)pi/(n+1));
// symmetric and involutory
Eigen::MatrixXd sine_matrix(int n) {
  Eigen::MatrixXd S(n, n);
  const double scale = std::sqrt(2.0 / (n + 1));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      S(i, k) = scale * std::sin((i + 1.0) * (k + 1.0) * kPi / (n + 1));
  return S;
}

// eigenvalues of the 3-point discrete Dirichlet Laplacian on (0, length)
Eigen::VectorXd laplacian_eigenvalues(int n, double h, double length) {
  Eigen::VectorXd lam(n);
  for (int k = 0; k < n; ++k) {
    const double sn = std::sin((k + 1.0) * kPi * h / (2.0 * length));
    lam[k] = 4.0 / (h * h) * sn * sn;
  }
  return lam;
}

// 8-point Gauss-Legendre rule on [-1, 1]
constexpr int kGaussN = 8;
constexpr double kGaussX[kGaussN] = {
    -0.96028985649753623, -0.79666647741362674, -0.52553240991632899,
    -0.18343464249564980, 0.18343464249564980,  0.52553240991632899,
    0.79666647741362674,  0.96028985649753623};
constexpr double kGaussW[kGaussN] = {
    0.10122853629037626, 0.22238103445337447, 0.31370664587788729,
    0.36268378337836198, 0.36268378337836198, 0.31370664587788729,
    0.22238103445337447, 0.10122853629037626};

bool near_half(double s) { return std::abs(s - 0.5) < 1e-8; }

// integral over [0,h]^2 of u^2 (u+v)^{-1-2s}
double moment_u2(double h, double s) {
  if (near_half(s)) return h * h * (1.0 - std::log(2.0));
  const double f4 = std::pow(4.0, s);
  const double num = -2.0 * f4 * s * s + 3.0 * f4 * s - 2.0 * f4 + 4.0 * s * s -
                     2.0 * s + 2.0;
  const double den =
      2.0 * f4 * s * (2.0 * s - 1.0) * (2.0 * s - 3.0) * (s - 1.0);
  return std::pow(h, 3.0 - 2.0 * s) * num / den;
}

// integral over [0,h]^2 of u v (u+v)^{-1-2s}
double moment_uv(double h, double s) {
  if (near_half(s)) return 0.5 * h * h * (2.0 * std::log(2.0) - 1.0);
  const double f4 = std::pow(4.0, s);
  return std::pow(h, 3.0 - 2.0 * s) * (2.0 * s + 1.0 - f4) /
         (f4 * s * (2.0 * s - 1.0) * (2.0 * s - 3.0));
}

// integral over T x T of (x-y)^2 |x-y|^{-1-2s}
double moment_same(double h, double s) {
  return 2.0 * std::pow(h, 3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
}

// integral over [a,b] of (c0 + c1 x + c2 x^2) x^{-2s}; a = 0 is legal only
// for coefficients whose term stays integrable (zero coefficients are
// skipped, never multiplied against a divergent antiderivative)
double poly_power_integral(double c0, double c1, double c2, double a, double b,
                           double s) {
  double acc = 0.0;
  if (c0 != 0.0) {
    if (near_half(s))
      acc += c0 * std::log(b / a);
    else
      acc += c0 * (std::pow(b, 1.0 - 2.0 * s) - std::pow(a, 1.0 - 2.0 * s)) /
             (1.0 - 2.0 * s);
  }
  if (c1 != 0.0)
    acc += c1 * (std::pow(b, 2.0 - 2.0 * s) - std::pow(a, 2.0 - 2.0 * s)) /
           (2.0 - 2.0 * s);
  if (c2 != 0.0)
    acc += c2 * (std::pow(b, 3.0 - 2.0 * s) - std::pow(a, 3.0 - 2.0 * s)) /
           (3.0 - 2.0 * s);
  return acc;
}

struct LinearShape {
  double alpha, beta;  // N(x) = alpha + beta x
  double at(double x) const { return alpha + beta * x; }
};

// Gagliardo P1 stiffness of the whole-space inner product, zero exterior
// extension. Interior node indices are 1..n; returned matrix is 0-based.
Eigen::MatrixXd assemble_gagliardo(int n, double h, double L, double s) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const int nel = n + 1;  // elements [x_e, x_{e+1}], e = 0..n

  auto add = [&](int gi, int gj, double val) {
    if (gi < 1 || gi > n || gj < 1 || gj > n) return;
    A(gi - 1, gj - 1) += val;
  };

  // same-element pairs: both hat differences reduce to slopes times (x - y)
  const double q_same = moment_same(h, s) / (h * h);
  for (int e = 0; e < nel; ++e) {
    add(e, e, q_same);
    add(e + 1, e + 1, q_same);
    add(e, e + 1, -q_same);
    add(e + 1, e, -q_same);
  }

  // adjacent pairs (shared node): singular corner, closed-form moments;
  // factor 2 accounts for the mirrored (f, e) ordering
  const double m20 = moment_u2(h, s) / (h * h);
  const double m11 = moment_uv(h, s) / (h * h);
  for (int e = 0; e + 1 < nel; ++e) {
    const int a = e, b = e + 1, c = e + 2;
    add(a, a, 2.0 * m20);
    add(b, b, 4.0 * (m20 - m11));
    add(c, c, 2.0 * m20);
    add(a, b, 2.0 * (m11 - m20));
    add(b, a, 2.0 * (m11 - m20));
    add(a, c, -2.0 * m11);
    add(c, a, -2.0 * m11);
    add(b, c, 2.0 * (m11 - m20));
    add(c, b, 2.0 * (m11 - m20));
  }

  // separated pairs: smooth kernel, tensor Gauss quadrature.
  // local coordinates: u = x_{e+1} - x, v = y - x_f, so y - x = u + v + gap
  double gx[kGaussN], gw[kGaussN];
  for (int i = 0; i < kGaussN; ++i) {
    gx[i] = 0.5 * h * (kGaussX[i] + 1.0);
    gw[i] = 0.5 * h * kGaussW[i];
  }
  for (int e = 0; e < nel; ++e) {
    for (int f = e + 2; f < nel; ++f) {
      const double gap = (f - e - 1) * h;
      const int nodes[4] = {e, e + 1, f, f + 1};
      double loc[4][4] = {};
      for (int iq = 0; iq < kGaussN; ++iq) {
        for (int jq = 0; jq < kGaussN; ++jq) {
          const double u = gx[iq], v = gx[jq];
          const double r = u + v + gap;
          const double ker =
              gw[iq] * gw[jq] * std::exp((-1.0 - 2.0 * s) * std::log(r));
          const double d[4] = {u / h, (h - u) / h, -(h - v) / h, -v / h};
          for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) loc[a][b] += d[a] * d[b] * ker;
        }
      }
      for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
          add(nodes[a], nodes[b], 2.0 * loc[a][b]);
          if (a != b) add(nodes[b], nodes[a], 2.0 * loc[a][b]);
        }
    }
  }

  // exterior contribution: 2 * integral of N_i N_j rho with
  // rho(x) = (x^{-2s} + (L-x)^{-2s}) / (2s)
  const double rho_scale = 2.0 / (2.0 * s);
  {
    // first element: only node 1, shape x/h exactly; x^{-2s} part in closed
    // form, (L-x)^{-2s} part regular in t = L - x
    double ix = poly_power_integral(0.0, 0.0, 1.0 / (h * h), 0.0, h, s);
    LinearShape nt{L / h, -1.0 / h};  // node-1 shape as polynomial in t
    double il = poly_power_integral(nt.alpha * nt.alpha, 2.0 * nt.alpha * nt.beta,
                                    nt.beta * nt.beta, L - h, L, s);
    add(1, 1, rho_scale * (ix + il));
  }
  for (int e = 1; e + 1 < nel; ++e) {
    const double xe = e * h, xe1 = (e + 1) * h;
    const LinearShape shapes_x[2] = {{xe1 / h, -1.0 / h}, {-xe / h, 1.0 / h}};
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        const LinearShape &p = shapes_x[a], &q = shapes_x[b];
        const double ix = poly_power_integral(
            p.alpha * q.alpha, p.alpha * q.beta + q.alpha * p.beta,
            p.beta * q.beta, xe, xe1, s);
        // same product as a polynomial in t = L - x
        const LinearShape pt{p.alpha + p.beta * L, -p.beta};
        const LinearShape qt{q.alpha + q.beta * L, -q.beta};
        const double il = poly_power_integral(
            pt.alpha * qt.alpha, pt.alpha * qt.beta + qt.alpha * pt.beta,
            pt.beta * qt.beta, L - xe1, L - xe, s);
        const double val = rho_scale * (ix + il);
        add(e + a, e + b, val);
        if (a != b) add(e + b, e + a, val);
      }
  }
  {
    // last element: only node n, whose shape falls to zero at L; it is the
    // monomial t/h' in t = L - x with h' = L - x_n
    const double hp = L - n * h;
    double il = poly_power_integral(0.0, 0.0, 1.0 / (hp * hp), 0.0, hp, s);
    LinearShape nx{L / hp, -1.0 / hp};  // the same falling shape in x
    double ix = poly_power_integral(nx.alpha * nx.alpha, 2.0 * nx.alpha * nx.beta,
                                    nx.beta * nx.beta, n * h, L, s);
    add(n, n, rho_scale * (ix + il));
  }

  return A;
}

}  // namespace

FracOperator spectral_operator(const Grid& grid, double s) {
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("spectral_operator: s must lie in (0,1]");
  FracOperator op;
  op.kind_ = OperatorKind::spectral;
  op.s_ = s;
  op.grid_ = grid;
  const int n1 = grid.n[0];
  op.sine1_ = sine_matrix(n1);
  const Eigen::VectorXd lam1 =
      laplacian_eigenvalues(n1, grid.h[0], grid.length[0]);
  if (grid.dim == 1) {
    op.eig_pow_.resize(n1, 1);
    for (int k = 0; k < n1; ++k) op.eig_pow_(k, 0) = std::pow(lam1[k], s);
    op.apply_diag_ = op.sine1_.array().square().matrix() * op.eig_pow_.col(0);
    op.lambda1_pow_ = op.eig_pow_(0, 0);
  } else {
    const int n2 = grid.n[1];
    op.sine2_ = sine_matrix(n2);
    const Eigen::VectorXd lam2 =
        laplacian_eigenvalues(n2, grid.h[1], grid.length[1]);
    op.eig_pow_.resize(n1, n2);
    for (int k = 0; k < n1; ++k)
      for (int l = 0; l < n2; ++l)
        op.eig_pow_(k, l) = std::pow(lam1[k] + lam2[l], s);
    const Eigen::MatrixXd b1 = op.sine1_.array().square().matrix();
    const Eigen::MatrixXd b2 = op.sine2_.array().square().matrix();
    Eigen::MatrixXd diag = b1 * op.eig_pow_ * b2.transpose();
    op.apply_diag_ = Eigen::Map<Eigen::VectorXd>(diag.data(), grid.size());
    op.lambda1_pow_ = op.eig_pow_(0, 0);
  }
  return op;
}

FracOperator integral_stiffness(const Grid& grid, double s, int max_n) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("integral_stiffness: s must lie in (0,1)");
  if (grid.dim != 1)
    throw std::invalid_argument(
        "integral_stiffness: only 1-D grids are supported (use the spectral "
        "operator in 2-D)");
  if (grid.size() > max_n)
    throw std::invalid_argument("integral_stiffness: n = " +
                                std::to_string(grid.size()) +
                                " exceeds the dense assembly cap " +
                                std::to_string(max_n));
  FracOperator op;
  op.kind_ = OperatorKind::integral;
  op.s_ = s;
  op.grid_ = grid;
  op.dense_ = assemble_gagliardo(grid.n[0], grid.h[0], grid.length[0], s);
  // lumped L2 term completes the H^s norm
  op.dense_.diagonal().array() += grid.cell_weight();
  return op;
}

GridFunction FracOperator::apply(const GridFunction& u) const {
  require_match(grid_, u);
  if (kind_ == OperatorKind::integral) return dense_ * u / grid_.cell_weight();
  if (grid_.dim == 1)
    return sine1_ * (eig_pow_.col(0).asDiagonal() * (sine1_ * u));
  const int n1 = grid_.n[0], n2 = grid_.n[1];
  Eigen::Map<const Eigen::MatrixXd> U(u.data(), n1, n2);
  Eigen::MatrixXd W = eig_pow_.cwiseProduct(sine1_ * U * sine2_);
  Eigen::MatrixXd R = sine1_ * W * sine2_;
  return Eigen::Map<Eigen::VectorXd>(R.data(), grid_.size());
}

double FracOperator::inner(const GridFunction& u, const GridFunction& v) const {
  require_match(grid_, u);
  require_match(grid_, v);
  if (kind_ == OperatorKind::integral) return v.dot(dense_ * u);
  return grid_.cell_weight() * v.dot(apply(u));
}

double FracOperator::norm(const GridFunction& u) const {
  return std::sqrt(std::max(0.0, inner(u, u)));
}

GridFunction FracOperator::system_matvec(double c, const GridFunction& w,
                                         const GridFunction& v) const {
  const double wc = grid_.cell_weight();
  if (kind_ == OperatorKind::integral)
    return c * (dense_ * v) + wc * w.cwiseProduct(v);
  return c * wc * apply(v) + wc * w.cwiseProduct(v);
}

GridFunction FracOperator::solve_shifted(double c, const GridFunction& w,
                                         const GridFunction& rhs, double tol,
                                         int max_iter) const {
  require_match(grid_, w);
  require_match(grid_, rhs);
  if (!(c > 0.0)) throw std::invalid_argument("solve_shifted: c must be > 0");
  if ((w.array() < 0.0).any())
    throw std::invalid_argument("solve_shifted: weights must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_shifted: tol must be > 0");
  const int n = grid_.size();
  if (max_iter <= 0) max_iter = 10 * n;

  const double wc = grid_.cell_weight();
  Eigen::VectorXd diag =
      (kind_ == OperatorKind::integral)
          ? (c * dense_.diagonal() + wc * w).eval()
          : (c * wc * apply_diag_ + wc * w).eval();

  GridFunction x = GridFunction::Zero(n);
  GridFunction r = rhs;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return x;
  const double target = tol * rhs_norm;

  GridFunction z = r.cwiseQuotient(diag);
  GridFunction p = z;
  double rz = r.dot(z);
  double res = r.norm();
  for (int it = 0; it < max_iter; ++it) {
    const GridFunction Ap = system_matvec(c, w, p);
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    res = r.norm();
    if (res <= target) return x;
    z = r.cwiseQuotient(diag);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw std::runtime_error(
      "solve_shifted: CG did not converge in " + std::to_string(max_iter) +
      " iterations; relative residual = " + std::to_string(res / rhs_norm));
}

Eigen::MatrixXd FracOperator::dense_matrix() const {
  if (kind_ == OperatorKind::integral) return dense_;
  const int n = grid_.size();
  Eigen::MatrixXd A(n, n);
  GridFunction e = GridFunction::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    A.col(j) = grid_.cell_weight() * apply(e);
    e[j] = 0.0;
  }
  return A;
}

double FracOperator::coercivity_lower_bound() const {
  return kind_ == OperatorKind::spectral ? lambda1_pow_ : 1.0;
}

}  // namespace fraclp
