#pragma once

#include <utility>

#include "ktorus/field.hpp"
#include "ktorus/killing.hpp"

namespace ktorus {

/// The auxiliary pair v = u_x / lambda, w = u_y / lambda (real fields).
struct VWPair {
  FourierField v;
  FourierField w;
};

/// u = p*x + q*y + periodic part; the additive constant is fixed by a zero
/// mean, the derivatives u_x, u_y are lattice-periodic.
struct Potential {
  std::pair<double, double> linear{0.0, 0.0};
  FourierField periodic;
};

/// Explicit Fourier solution of the first-order system:
///   v_n = (-c2 m1^2 + 2 c1 m1 m2 + c2 m2^2)/|m|^2 * coeff(n),
///   w_n = ( c1 m1^2 + 2 c2 m1 m2 - c1 m2^2)/|m|^2 * coeff(n)   (m != 0),
/// zero modes v_0 = -a2, w_0 = a1.
VWPair compute_vw(const FourierField& f, const KillingConstants& k);

struct ReconstructChecks {
  double cr_norm = 0.0;           // Cauchy-Riemann pair, holds by construction
  double consistency_norm = 0.0;  // d_y(lambda v) - d_x(lambda w)
};

ReconstructChecks residual_checks(const FourierField& f, const KillingConstants& k,
                                  const VWPair& vw);

/// Antidifferentiates (lambda v, lambda w) into a Potential.  Throws
/// check_failure carrying the worst node when the pair fails the curl-free
/// consistency test beyond tol (per-node coefficient check).
Potential integrate_u(const FourierField& f, const VWPair& vw, double tol);

/// Max absolute residual of the two second-order equations
///   u_xx - u_yy - (lambda_x u_x - lambda_y u_y)/lambda = lambda(-c2 lambda_x + c1 lambda_y)
///   2 u_xy - (lambda_y u_x + lambda_x u_y)/lambda      = lambda( c1 lambda_x + c2 lambda_y)
/// sampled on a 32x32 grid of the fundamental domain.  Throws check_failure
/// if lambda is not positive everywhere on the grid.
double hessian_residual(const FourierField& f, const KillingConstants& k,
                        const Potential& u);

}  // namespace ktorus
