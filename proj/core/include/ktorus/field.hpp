#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "ktorus/lattice.hpp"

namespace ktorus {

using Complex = std::complex<double>;

/// Integer coefficient pair w.r.t. the dual basis.
struct NodeIndex {
  int n1 = 0;
  int n2 = 0;

  friend bool operator==(NodeIndex a, NodeIndex b) { return a.n1 == b.n1 && a.n2 == b.n2; }
  friend bool operator<(NodeIndex a, NodeIndex b) {
    return a.n1 != b.n1 ? a.n1 < b.n1 : a.n2 < b.n2;
  }
  NodeIndex operator-() const { return {-n1, -n2}; }
  NodeIndex operator+(NodeIndex o) const { return {n1 + o.n1, n2 + o.n2}; }
  NodeIndex operator-(NodeIndex o) const { return {n1 - o.n1, n2 - o.n2}; }
  bool is_origin() const { return n1 == 0 && n2 == 0; }
  /// Lexicographic positivity; exactly one of n, -n is positive for n != 0.
  bool lex_positive() const { return n1 > 0 || (n1 == 0 && n2 > 0); }
};

using CoeffMap = std::map<NodeIndex, Complex>;

/// A Gamma-periodic scalar field stored as finitely many Fourier coefficients
/// on the dual lattice.  Real fields enforce the conjugate-symmetry
/// coeff(-n) == conj(coeff(n)) exactly; outputs of d/dz-style operators are
/// not coefficients of a real function and carry parity_exempt() == true.
class FourierField {
 public:
  /// Real field: `half` lists the zero mode (imaginary part must be 0) and/or
  /// lexicographically positive indices; negatives are mirrored by parity.
  static FourierField real_field(const DualLattice& dual, const CoeffMap& half);

  /// Real field from a full coefficient map; verifies parity exactly.
  static FourierField real_field_full(const DualLattice& dual, const CoeffMap& full);

  /// Parity-exempt complex-coefficient variant.
  static FourierField complex_field(const DualLattice& dual, const CoeffMap& full);

  const DualLattice& dual() const { return dual_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  bool parity_exempt() const { return parity_exempt_; }
  int support_bound() const { return band_; }

  Complex coeff(NodeIndex n) const;
  Complex zero_mode() const { return coeff({0, 0}); }
  Eigen::Vector2d node(NodeIndex n) const { return dual_.node(n.n1, n.n2); }

  /// Pointwise value; for parity-exempt fields this is the full complex sum.
  Complex evaluate_complex(double x, double y) const;
  /// Real part of the sum (the value of a real field).
  double evaluate(double x, double y) const;

  enum class DiffOp { dx, dy, dz, dzbar, laplacian, inverse_laplacian };

  /// Fourier-multiplier operators in physical node coordinates m:
  ///   dz: i(m1 - i m2)/2, dzbar: i(m1 + i m2)/2, laplacian: -(m1^2 + m2^2),
  ///   inverse_laplacian: -1/(m1^2 + m2^2) with the zero mode mapped to 0.
  FourierField diff(DiffOp op) const;

  /// Exact coefficient convolution (the coefficients of the pointwise product).
  friend FourierField convolve(const FourierField& f, const FourierField& g);

  FourierField operator+(const FourierField& o) const;
  FourierField operator-(const FourierField& o) const;
  /// Multiplication by a complex scalar (parity-exempt unless the scalar is real).
  FourierField scaled(Complex s) const;
  /// Adds a real constant to the zero mode, preserving realness.
  FourierField shifted_zero_mode(double lambda0) const;
  /// Conjugate-symmetrizes a numerically real field: averages coeff(n) with
  /// conj(coeff(-n)) on the canonical half and mirrors.
  FourierField symmetrized() const;

  double coeff_norm() const;     // l2 norm of the stored coefficients
  double coeff_max_abs() const;  // max |coeff|

 private:
  FourierField(const DualLattice& dual, CoeffMap coeffs, bool exempt);

  DualLattice dual_;
  CoeffMap coeffs_;
  bool parity_exempt_ = false;
  int band_ = 0;
};

struct SpectrumReport {
  std::vector<NodeIndex> spectrum;                  // off-origin indices with coeff != 0 exactly
  std::optional<Eigen::Vector2d> one_dimensional;   // unit line direction, angle in [0,pi)
  Complex zero_mode{0.0, 0.0};
  double decay_sum = 0.0;                           // sum_{n != 0} |coeff|
};

/// Exact-zero spectrum, single-line test on the nonzero off-origin nodes
/// (pairwise cross products within 1e-12 relative), and the l1 decay sum.
SpectrumReport spectrum_analysis(const FourierField& f);

}  // namespace ktorus
