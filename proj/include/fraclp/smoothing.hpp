#pragma once

#include "fraclp/grid.hpp"

namespace fraclp {

/// Parameters of the C^1 concave smoothing psi_eps of t -> t^{p/2}:
///
///   psi_eps(t) = (p/2) t / eps^{2-p} + (1 - p/2) eps^p   for t < eps^2,
///   psi_eps(t) = t^{p/2}                                 for t >= eps^2,
///
/// so that psi_0(u^2) = |u|^p. eps = 0 selects the nonsmooth limit.
struct PsiParams {
  double p;    // exponent, in (0,1)
  double eps;  // smoothing parameter, >= 0
};

void validate(const PsiParams& params);

double psi(const PsiParams& params, double t);

/// psi'_eps(t) = (p/2) min(eps^{p-2}, t^{(p-2)/2}); requires eps > 0 or t > 0.
double psi_prime(const PsiParams& params, double t);

/// G_eps(u) = integral of psi_eps(u^2); equals lp_pseudonorm(u, p) at eps = 0.
double g_eps(const Grid& grid, const GridFunction& u, const PsiParams& params);

/// L2-Riesz gradient of G_eps, nodal values 2 u_i psi'_eps(u_i^2). eps > 0 only:
/// the nonsmooth limit has no single-valued derivative at 0.
GridFunction g_eps_grad(const Grid& grid, const GridFunction& u,
                        const PsiParams& params);

/// The two sides of p*integral(|u|^p) >= G'_eps(u)u:
///   lower = p * integral( min(eps^{p-2}, |u|^{p-2}) u^2 ),
///   upper = p * lp_pseudonorm(u, p).
struct PairingBound {
  double lower;
  double upper;
};

PairingBound pairing_bound(const Grid& grid, const GridFunction& u,
                           const PsiParams& params);

}  // namespace fraclp
