#include "ktorus/lattice.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ktorus/errors.hpp"

namespace ktorus {

namespace {

void require_nonsingular(const Eigen::Matrix2d& basis, const char* who) {
  const double det = basis.determinant();
  const double scale = basis.squaredNorm();
  if (!(std::abs(det) > 1e-12 * scale)) {
    std::ostringstream os;
    os << who << ": singular basis (|det| = " << std::abs(det) << ")";
    throw validation_error(os.str());
  }
}

}  // namespace

Lattice::Lattice(const Eigen::Matrix2d& basis) : basis_(basis) {
  require_nonsingular(basis_, "Lattice");
}

DualLattice::DualLattice(const Eigen::Matrix2d& basis) : basis_(basis) {
  require_nonsingular(basis_, "DualLattice");
  // Recognize an already-normal basis so (b,d) indexing is available.
  if (std::abs(basis(0, 0) - 1.0) <= 1e-12 && std::abs(basis(1, 0)) <= 1e-12 &&
      basis(0, 1) >= 0.0 && basis(0, 1) < 1.0 && basis(1, 1) > 0.0) {
    normalized_ = std::pair<double, double>(basis(0, 1), basis(1, 1));
  }
}

DualLattice::DualLattice(double b, double d) {
  if (!(b >= 0.0 && b < 1.0)) throw validation_error("DualLattice: b must lie in [0,1)");
  if (!(d > 0.0)) throw validation_error("DualLattice: d must be positive");
  basis_ << 1.0, b, 0.0, d;
  normalized_ = std::pair<double, double>(b, d);
}

std::pair<double, double> DualLattice::normalized() const {
  if (!normalized_) throw validation_error("DualLattice: basis is not in normal form");
  return *normalized_;
}

Eigen::Matrix2d DualLattice::primal_basis() const {
  return 2.0 * M_PI * basis_.inverse().transpose();
}

bool NormalizeTransform::is_identity(double tol) const {
  return std::abs(rotation) <= tol && std::abs(scale - 1.0) <= tol && !swapped &&
         !flipped && shear == 0;
}

DualLattice dual_basis(const Lattice& lat) {
  const Eigen::Matrix2d dual = 2.0 * M_PI * lat.basis().inverse().transpose();
  return DualLattice(dual);
}

std::pair<DualLattice, NormalizeTransform> normalize_basis(const DualLattice& dual) {
  const Eigen::Vector2d g0 = dual.generator(0);
  const Eigen::Vector2d g1 = dual.generator(1);

  NormalizeTransform tf;

  // e1 = the shorter generator; tie by smaller nonnegative polar angle.
  const double l0 = g0.norm(), l1 = g1.norm();
  auto angle_of = [](const Eigen::Vector2d& v) {
    double a = std::atan2(v.y(), v.x());
    if (a < 0) a += 2.0 * M_PI;
    return a;
  };
  if (l1 < l0 || (l1 == l0 && angle_of(g1) < angle_of(g0))) tf.swapped = true;
  Eigen::Vector2d e1 = tf.swapped ? g1 : g0;
  Eigen::Vector2d e2 = tf.swapped ? g0 : g1;

  tf.rotation = angle_of(e1);
  tf.scale = 1.0 / e1.norm();

  const double c = std::cos(-tf.rotation), s = std::sin(-tf.rotation);
  Eigen::Matrix2d map;
  map << c, -s, s, c;
  map *= tf.scale;

  e1 = map * e1;  // (1, 0) up to roundoff
  e2 = map * e2;
  e1 = {1.0, 0.0};

  if (e2.y() < 0.0) {
    e2 = -e2;
    tf.flipped = true;
  }
  if (e2.y() == 0.0) throw validation_error("normalize_basis: collinear generators");

  const double k = std::floor(e2.x());
  tf.shear = static_cast<int>(-k);
  double b = e2.x() - k;
  if (b >= 1.0) {  // guard against b = 1 - eps rounding up through floor
    b -= 1.0;
    tf.shear -= 1;
  }

  return {DualLattice(b, e2.y()), tf};
}

int ThreeLineConfig::line_of(int n1, int n2, int* stride) const {
  if (n1 == 0 && n2 == 0) return -1;
  if (n2 == 0) {
    if (stride) *stride = n1;
    return 0;
  }
  if (p[1] != 0 && n2 % p[1] == 0) {
    const int n = n2 / p[1];
    if (n != 0 && n1 == n * p[0]) {
      if (stride) *stride = n;
      return 1;
    }
  }
  if (q[1] != 0 && n2 % q[1] == 0) {
    const int n = n2 / q[1];
    if (n != 0 && n1 == n * q[0]) {
      if (stride) *stride = n;
      return 2;
    }
  }
  return -1;
}

ThreeLineConfig pq_config(std::array<int, 2> p, std::array<int, 2> q) {
  const auto [p1, p2] = std::pair(p[0], p[1]);
  const auto [q1, q2] = std::pair(q[0], q[1]);
  auto fail = [](const char* cond) {
    throw validation_error(std::string("pq_config: violated ") + cond);
  };

  if (std::gcd(p1, p2) != 1) fail("gcd(p1,p2) = 1");
  if (std::gcd(q1, q2) != 1) fail("gcd(q1,q2) = 1");
  if (!(p2 > 0)) fail("p2 > 0");
  if (!(q2 > 0)) fail("q2 > 0");
  if (!(q1 < 0)) fail("q1 < 0");
  // max{(q1/q2) p2, -(2 + q1/q2) p2} < p1 <= -(q1/q2) p2, cleared of q2 > 0.
  if (!(q1 * p2 < p1 * q2)) fail("(q1/q2) p2 < p1");
  if (!(p1 * q2 + p2 * q1 + 2 * p2 * q2 > 0)) fail("-(2 + q1/q2) p2 < p1");
  if (!(p1 * q2 + p2 * q1 <= 0)) fail("p1 <= -(q1/q2) p2");

  ThreeLineConfig cfg;
  cfg.p = p;
  cfg.q = q;
  cfg.b = -0.5 * (double(p1) / p2 + double(q1) / q2);
  cfg.d = 0.5 * std::sqrt(3.0) * (double(p1) / p2 - double(q1) / q2);
  cfg.dGcd = std::gcd(p2, q2);
  cfg.p2Prime = p2 / cfg.dGcd;
  cfg.q2Prime = q2 / cfg.dGcd;
  cfg.delta = p1 * cfg.q2Prime - cfg.p2Prime * q1;
  return cfg;
}

ThreeLineConfig honeycomb_config() { return pq_config({0, 1}, {-1, 1}); }

}  // namespace ktorus
