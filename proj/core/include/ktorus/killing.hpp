#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "ktorus/field.hpp"
#include "ktorus/lattice.hpp"

namespace ktorus {

/// The real constant 4-vector (a1,a2,c1,c2) of the quadratic spectral system.
/// Complex packings: a = (a1 + i a2)/4, c = c1 + i c2.
struct KillingConstants {
  double a1 = 0.0, a2 = 0.0;
  double c1 = 0.0, c2 = 0.0;

  Complex a_complex() const { return 0.25 * Complex{a1, a2}; }
  Complex c_complex() const { return {c1, c2}; }
  bool c_nontrivial() const { return c1 * c1 + c2 * c2 > 0.0; }
};

struct ResidualReport {
  std::map<NodeIndex, Complex> per_equation;
  double norm = 0.0;     // l2 over all equations
  double max_abs = 0.0;
  NodeIndex worst{0, 0};
  int equation_count = 0;
};

ResidualReport make_report(std::map<NodeIndex, Complex> per_equation);

/// Residual of the quadratic system over the exact finite equation set
/// (support of the coefficient convolution united with the support of the
/// field): at each dual node n (coordinates m),
///   sum_{k != 0} [c1(-m1 K1^2 + 2 m2 K1 K2 + m1 K2^2)
///               + c2(-m2 K1^2 - 2 m1 K1 K2 + m2 K2^2)] / |K|^2
///     * coeff(k) coeff(n-k)  -  (a1 m1 + a2 m2) coeff(n),
/// with K the physical coordinates of k.  The n = 0 equation is identically 0.
ResidualReport system_residual(const FourierField& f, const KillingConstants& k);

/// The pseudodifferential form: d/dz(lambda (c Lap^{-1} lambda_zz + a))
///   + d/dzbar(lambda (cbar Lap^{-1} lambda_zbzb + abar)), assembled entirely
/// from field operators; returns the (real) coefficient field.
FourierField pde_residual(const FourierField& f, const KillingConstants& k);

/// Node-independent ratio pde-coefficient / system-residual, calibrated once
/// on a reference mode and cached (equals -i/4 in exact arithmetic).
Complex pde_system_factor();

/// Multipliers of the integer-indexed system on a normalized lattice (b,d):
///   psi = c1 psi1 + c2 psi2 with
///   psi1 = d [n2 k1^2 + 2(n1 + 2b n2) k1 k2 + (2b n1 + (3b^2 - d^2) n2) k2^2] / D,
///   psi2 = [-(n1 + b n2) k1^2 + 2(-b n1 + (d^2 - b^2) n2) k1 k2
///           + ((d^2 - b^2) n1 + b(3d^2 - b^2) n2) k2^2] / D,
///   D = (k1 + b k2)^2 + d^2 k2^2.
double psi1(int n1, int n2, int k1, int k2, double b, double d);
double psi2(int n1, int n2, int k1, int k2, double b, double d);
double psi(int n1, int n2, int k1, int k2, double c1, double c2, double b, double d);

/// The three-line specializations use rescaled constants (c1 := c1/d,
/// c2 := 2 c2); this maps the rescaled pair back to the raw psi convention.
KillingConstants section3_to_raw_constants(const ThreeLineConfig& cfg, double c1, double c2);

/// Line-0 multiplier in the rescaled convention:
///   -2 c2 n1 + (c1 + c2 (p1/p2 + q1/q2)) n2.
double phi_line0(int n1, int n2, const ThreeLineConfig& cfg, double c1, double c2);

/// The c = (1,0) line multiplier phi(n; pa; pb) = pb2 (pa2 n1 - pa1 n2) /
/// (pa1 pb2 - pa2 pb1); pass (p,q) for the 60-degree line and (q,p) for 120.
double phi(int n1, int n2, std::array<int, 2> pa, std::array<int, 2> pb);

/// Residual of the integer-indexed system with the psi multipliers as printed
/// (note: its (c1,c2) corresponds to (c2,-c1) of system_residual, and its a2
/// to b*a1 + d*a2).  The field's dual lattice must be in normal form.
ResidualReport integer_system_residual(const FourierField& f, double b, double d,
                                       const KillingConstants& k);
ResidualReport integer_system_residual(const FourierField& f, const ThreeLineConfig& cfg,
                                       const KillingConstants& k);

/// Unit-norm constrained least squares over (c1,c2,a1,a2): eliminates (a1,a2)
/// by a pseudoinverse Schur complement and solves the remaining symmetric 2x2
/// eigenproblem for c; the sign makes the first nonzero component of c
/// positive.  Throws on a degenerate normal matrix (e.g. constant fields).
struct BestConstantsResult {
  KillingConstants constants;
  double residual_norm = 0.0;
};
BestConstantsResult best_constants(const FourierField& f);

/// Joint fit with the same constants for f and f + lambda0 (the shifted-pair
/// least squares used by the shift experiment).
BestConstantsResult best_constants_joint(const FourierField& f, double lambda0);

/// The cubic spectral constraint c1 (n1^2 - 3 n2^2) n1 + c2 (3 n1^2 - n2^2) n2
/// evaluated on physical node coordinates.
double cubic_form(const Eigen::Vector2d& m, double c1, double c2);

struct CubicReport {
  /// Unit admissible directions, up to sign (empty, or a single direction; a
  /// nonempty spectrum never leaves the full 2-dimensional nullspace).
  std::vector<Eigen::Vector2d> admissible_directions;
  /// Set when c was supplied: whether that c annihilates every node.
  std::optional<bool> given_admissible;
  /// Present iff all spectrum lines fit the family alpha + k*pi/3.
  std::optional<std::array<double, 3>> three_lines;
};

/// Analyzes the cubic constraint over a node set (physical coordinates,
/// origin excluded).  Empty input throws.
CubicReport cubic_analysis(const std::vector<Eigen::Vector2d>& spectrum,
                           std::optional<Eigen::Vector2d> c = std::nullopt);

/// c lambda_zzz + cbar lambda_zbzbzb as a coefficient field.
FourierField cubic_field(const FourierField& f, const KillingConstants& k);

struct ShiftTestResult {
  double base_norm = 0.0;
  double shifted_norm = 0.0;
  double cubic_norm = 0.0;
};

/// Residual norms for f and for f with its zero mode shifted by lambda0,
/// plus the coefficient norm of the cubic equation's left-hand side.
ShiftTestResult shift_test(const FourierField& f, double lambda0,
                           const KillingConstants& k);

}  // namespace ktorus
