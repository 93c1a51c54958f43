#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>

namespace ktorus {

/// Planar lattice given by two generator vectors (columns of `basis`).
class Lattice {
 public:
  /// Throws validation_error when |det| <= 1e-12 * squared Frobenius norm.
  explicit Lattice(const Eigen::Matrix2d& basis);

  const Eigen::Matrix2d& basis() const { return basis_; }
  Eigen::Vector2d generator(int i) const { return basis_.col(i); }
  double det() const { return basis_.determinant(); }

 private:
  Eigen::Matrix2d basis_;
};

/// Dual lattice: vectors k with k.n in 2*pi*Z for every primal generator n.
/// When `normalized` is set, the basis is {(1,0),(b,d)} with b in [0,1), d>0,
/// and integer coefficient pairs index nodes as m = (n1 + b*n2, d*n2).
class DualLattice {
 public:
  explicit DualLattice(const Eigen::Matrix2d& basis);
  /// Normal-form constructor, basis {(1,0),(b,d)}.
  DualLattice(double b, double d);

  const Eigen::Matrix2d& basis() const { return basis_; }
  Eigen::Vector2d generator(int i) const { return basis_.col(i); }
  bool is_normalized() const { return normalized_.has_value(); }
  std::pair<double, double> normalized() const;  // (b, d); throws if not set

  /// Physical plane coordinates of the node with integer coefficients (n1,n2).
  Eigen::Vector2d node(int n1, int n2) const {
    return basis_ * Eigen::Vector2d(n1, n2);
  }

  /// Basis of the primal lattice (t_i with e_j . t_i = 2*pi*delta_ij).
  Eigen::Matrix2d primal_basis() const;

 private:
  Eigen::Matrix2d basis_;
  std::optional<std::pair<double, double>> normalized_;
};

/// Similarity map (and basis bookkeeping) applied by normalize_basis.
/// The plane map is z -> scale * e^{-i rotation} z; swap/flip/shear only
/// relabel generators and leave the lattice point set unchanged.
struct NormalizeTransform {
  double rotation = 0.0;  // radians, applied clockwise (angle of the vector sent to +x)
  double scale = 1.0;     // positive
  bool swapped = false;   // generators exchanged so e1 is the shorter one
  bool flipped = false;   // e2 := -e2 to get d > 0
  int shear = 0;          // e2 := e2 + shear * e1 to get b in [0,1)

  bool is_identity(double tol = 1e-12) const;
};

/// B' = 2*pi*B^{-T}: the unique basis with B'^T B = 2*pi*I.
DualLattice dual_basis(const Lattice& lat);

/// Brings a dual basis to the normal form {(1,0),(b,d)}, b in [0,1), d > 0.
/// The rotation/scaling sends the shorter of the two given generators to
/// (1,0); a length tie is broken by the smaller nonnegative polar angle.
std::pair<DualLattice, NormalizeTransform> normalize_basis(const DualLattice& dual);

/// Three lines through the origin at mutual angle pi/3, encoded by the
/// coprime integer pairs p, q locating the closest lattice nodes on the
/// 60- and 120-degree lines; carries the derived lattice parameters.
struct ThreeLineConfig {
  std::array<int, 2> p;  // (p1, p2)
  std::array<int, 2> q;  // (q1, q2)
  double b = 0.0;
  double d = 0.0;
  int dGcd = 1;      // gcd(p2, q2)
  int p2Prime = 1;   // p2 / dGcd
  int q2Prime = 1;   // q2 / dGcd
  int delta = 1;     // p1*q2Prime - p2Prime*q1 (> 0)

  DualLattice dual() const { return DualLattice(b, d); }

  /// Generator nodes of the three spectral lines, physical coordinates.
  Eigen::Vector2d line0_node() const { return {1.0, 0.0}; }
  Eigen::Vector2d line1_node() const { return {p[0] + b * p[1], d * p[1]}; }
  Eigen::Vector2d line2_node() const { return {q[0] + b * q[1], d * q[1]}; }

  /// Which line an integer index pair lies on: 0,1,2, or -1 (off all lines,
  /// or the origin).  When on a line, *stride is the multiple n of the line's
  /// integer generator.
  int line_of(int n1, int n2, int* stride = nullptr) const;
};

/// Validates the coprimality and ordering constraints on (p,q) exactly in
/// integer arithmetic and derives (b,d), gcd split and delta. Throws
/// validation_error naming the first violated condition.
ThreeLineConfig pq_config(std::array<int, 2> p, std::array<int, 2> q);

/// The honeycomb configuration p=(0,1), q=(-1,1).
ThreeLineConfig honeycomb_config();

}  // namespace ktorus
