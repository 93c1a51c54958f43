#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "ktorus/field.hpp"
#include "ktorus/lattice.hpp"

namespace ktorus {

/// Three complex sequences x,y,z indexed by n in Z \ {0}, truncated to
/// |n| <= band.  Values are stored for n >= 1; negative indices are the
/// conjugates (the parity condition holds by construction).
class TripleSequence {
 public:
  explicit TripleSequence(int band);
  TripleSequence(std::vector<Complex> x, std::vector<Complex> y, std::vector<Complex> z);

  int band() const { return band_; }
  Complex x(int n) const { return at(x_, n); }
  Complex y(int n) const { return at(y_, n); }
  Complex z(int n) const { return at(z_, n); }
  void set(int n, Complex x, Complex y, Complex z);  // n >= 1

  /// sum_{n=1..band} (|x_n| + |y_n| + |z_n|)
  double decay_sum() const;
  /// Max |value| per sequence over the band, ordered (x, y, z).
  std::array<double, 3> max_abs() const;

 private:
  Complex at(const std::vector<Complex>& v, int n) const;
  int band_;
  std::vector<Complex> x_, y_, z_;
};

struct TrilinearResidual {
  double max_abs = 0.0;
  double l2 = 0.0;
  std::array<int, 2> worst{0, 0};
  int equation_count = 0;
};

/// Evaluates x_{n1} y_{n2} - x_{n1+n2} z_{n2} + y_{n1+n2} z_{-n1} over all
/// pairs with n1, n2, n1+n2 nonzero and |n1|, |n2|, |n1+n2| <= band.
/// Equations referencing indices beyond the band do not exist (hard
/// truncation, no zero padding).  Requires band >= 2.
TrilinearResidual trilinear_residual(const TripleSequence& s);

/// The four residual-preserving changes of variables:
///   1: x_n -> x_{-n} (and same for y, z); the index flip (n1,n2)->(-n1,-n2)
///   2: (x,y,z) -> (y, x, -z_{-n})
///   3: (x,y,z) -> (z, y, x)
///   4: (x,y,z) -> (-x_{-n}, z, y)
TripleSequence apply_symmetry(const TripleSequence& s, int which);

struct ModuliViolation {
  int m = 0;
  int n = 0;
  int relation = 0;  // 0: (|z|^2-|y|^2) with x_n, 1: (|x|^2-|z|^2) with y_n, 2: (|x|^2-|y|^2) with z_n
  double magnitude = 0.0;
};

/// Checks the squared-moduli identities that exact solutions satisfy:
/// (|z_m|^2 - |y_m|^2) x_n = (|z_{n-m}|^2 - |y_{n-m}|^2) x_n and the two
/// analogues, for 1 <= m <= n-1 <= band-1.  Requires the input to be a
/// solution (residual max <= solution_tol), otherwise throws.
std::vector<ModuliViolation> moduli_relations(const TripleSequence& s,
                                              double solution_tol = 1e-12,
                                              double violation_tol = 1e-10);

/// Spectrum of a field supported on the three lines of a ThreeLineConfig:
/// alpha on the axis, beta on the p-line, gamma on the q-line, with a shared
/// real zero mode.  Sequences are stored on both signs of the index;
/// conjugate-even data (the realness condition) is the default, but
/// conjugate-odd data is accepted and tracked, since the index-weighted
/// reduction below turns it into parity-valid triples.
class ThreeLineSpectrum {
 public:
  enum class Parity { conjugate_even, conjugate_odd };

  /// Mirrors values given for n >= 1 as conjugate-even sequences.
  static ThreeLineSpectrum from_half(const ThreeLineConfig& cfg, int band, double zero_mode,
                                     const std::vector<Complex>& alpha,
                                     const std::vector<Complex>& beta,
                                     const std::vector<Complex>& gamma);

  /// Accepts full two-sided data; classifies it as conjugate-even or
  /// conjugate-odd and rejects mixed parity.
  static ThreeLineSpectrum from_full(const ThreeLineConfig& cfg, int band, double zero_mode,
                                     const std::map<int, Complex>& alpha,
                                     const std::map<int, Complex>& beta,
                                     const std::map<int, Complex>& gamma);

  const ThreeLineConfig& config() const { return cfg_; }
  int band() const { return band_; }
  double zero_mode() const { return zero_mode_; }
  Parity parity() const { return parity_; }
  Complex alpha(int n) const { return at(alpha_, n); }
  Complex beta(int n) const { return at(beta_, n); }
  Complex gamma(int n) const { return at(gamma_, n); }

  /// The field with these line coefficients (conjugate-even data only).
  FourierField to_field() const;

 private:
  ThreeLineSpectrum(const ThreeLineConfig& cfg, int band, double zero_mode);
  Complex at(const std::map<int, Complex>& m, int n) const;

  ThreeLineConfig cfg_;
  int band_;
  double zero_mode_;
  Parity parity_ = Parity::conjugate_even;
  std::map<int, Complex> alpha_, beta_, gamma_;
};

struct ReductionCheck {
  double max_abs = 0.0;
  int equation_count = 0;  // 0 marks a vacuous premise (e.g. |delta| = 1)
};

struct ReductionResult {
  TripleSequence seq;
  ReductionCheck eq348;  // beta*gamma vanishing off the divisibility set
  ReductionCheck eq355;  // mixed alpha-beta-gamma relation off multiples of delta
  ReductionCheck eq360;  // the trilinear relation itself
};

/// Builds x_n = alpha_{delta n}/n, y_n = beta_{q2' n}/n, z_n = gamma_{p2' n}/n.
/// For conjugate-even spectra the divisor is i*n instead of n: every term of
/// the trilinear form is quadratic, so this changes nothing but restores the
/// sequences' conjugate symmetry.  The three side checks are evaluated
/// literally on (alpha, beta, gamma); |eq360| matches |residual(seq)|
/// equation by equation.  Throws when the band admits no strided index.
ReductionResult reduce_from_lines(const ThreeLineSpectrum& spec);

enum class ExtendStatus { consistent, overdetermined_inconsistent, underdetermined };
enum class Axis { x, y, z };

struct ExtendClassification {
  enum class Kind { one_dimensional, non_one_dimensional, violates_system };
  Kind kind = Kind::one_dimensional;
  std::optional<Axis> axis;                    // for one_dimensional with a nonzero line
  std::optional<std::array<int, 2>> witness;   // (n1,n2) of the worst violated equation
};

struct ExtendResult {
  std::optional<std::array<Complex, 3>> candidate;  // (x_n, y_n, z_n)
  ExtendStatus status = ExtendStatus::consistent;
  double solve_residual = 0.0;
  ExtendClassification classification;
};

/// Assembles the three frontier subsystems
///   z_{n-m} x_n - z_{-m} y_n = x_m y_{n-m}
///   x_{-m} y_n - x_{n-m} z_n = -y_{n-m} z_m
///   y_{-m} x_n + y_{n-m} z_{-n} = x_{n-m} z_{-m}      (1 <= m <= n-1)
/// as a real least-squares problem in (x_n, y_n, z_n) given the prefix, and
/// classifies the outcome.  Requires n >= 2, prefix band >= n-1, and the
/// prefix itself to satisfy the system (residual max <= 1e-12).
ExtendResult extend_and_classify(const TripleSequence& prefix, int n,
                                 double consistency_tol = 1e-10,
                                 double zero_tol = 1e-10);

struct GrowthResult {
  std::vector<double> r;       // r[0] = r0 plus `steps` iterates
  bool ratio_bound_ok = true;  // r_k / r_{k-1} >= 1/(1 + r_{k-1}) at every step
  double lower_bound = 0.0;    // r0 / prod(1 + r_k)
};

/// Iterates r_{n+1} = r_n / (1 - r_n^2) * sqrt(1 - 2 r_n cos(theta_n) + r_n^2).
/// `phases` supplies theta_n (a single value broadcasts).  Requires
/// r0 in (0,1); throws check_failure when an iterate reaches 1.
GrowthResult growth_recursion(double r0, const std::vector<double>& phases, int steps);

}  // namespace ktorus
