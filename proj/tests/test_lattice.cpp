#include <doctest.h>

#include <cmath>
#include <random>

#include "ktorus/errors.hpp"
#include "ktorus/lattice.hpp"

using namespace ktorus;

namespace {

Eigen::Matrix2d cols(double a1, double a2, double b1, double b2) {
  Eigen::Matrix2d m;
  m.col(0) = Eigen::Vector2d(a1, a2);
  m.col(1) = Eigen::Vector2d(b1, b2);
  return m;
}

bool in_two_pi_z(double v) {
  const double r = v / (2.0 * M_PI);
  return std::abs(r - std::round(r)) <= 1e-9;
}

// Two bases generate the same point set iff the change of basis is an integer
// matrix of determinant +-1.
bool same_point_set(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  const Eigen::Matrix2d u = a.inverse() * b;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (std::abs(u(i, j) - std::round(u(i, j))) > 1e-9) return false;
  return std::abs(std::abs(u.determinant()) - 1.0) <= 1e-9;
}

}  // namespace

TEST_CASE("dual basis of the 2pi-square lattice is the unit square") {
  const Lattice lat(cols(2 * M_PI, 0, 0, 2 * M_PI));
  const DualLattice dual = dual_basis(lat);
  CHECK(dual.generator(0).isApprox(Eigen::Vector2d(1, 0), 1e-14));
  CHECK(dual.generator(1).isApprox(Eigen::Vector2d(0, 1), 1e-14));
}

TEST_CASE("dual basis of the unit square is the 2pi square") {
  const Lattice lat(cols(1, 0, 0, 1));
  const DualLattice dual = dual_basis(lat);
  CHECK(dual.generator(0).isApprox(Eigen::Vector2d(2 * M_PI, 0), 1e-14));
  CHECK(dual.generator(1).isApprox(Eigen::Vector2d(0, 2 * M_PI), 1e-14));
}

TEST_CASE("dual generators pair to 2pi multiples with the primal basis") {
  const Lattice lat(cols(2 * M_PI, 0, M_PI, M_PI * std::sqrt(3.0)));
  const DualLattice dual = dual_basis(lat);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(in_two_pi_z(dual.generator(i).dot(lat.generator(j))));
}

TEST_CASE("singular bases are rejected") {
  CHECK_THROWS_AS(Lattice(cols(1, 2, 2, 4)), validation_error);
  CHECK_THROWS_AS(DualLattice(cols(1, 1, 1, 1)), validation_error);
  CHECK_THROWS_AS(DualLattice(0.5, 0.0), validation_error);
  CHECK_THROWS_AS(DualLattice(-0.1, 1.0), validation_error);
}

TEST_CASE("double dual reproduces the primal basis") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Matrix2d m = cols(u(rng), u(rng), u(rng), u(rng));
    if (std::abs(m.determinant()) < 0.1) continue;
    const Lattice lat(m);
    const DualLattice dual = dual_basis(lat);
    const DualLattice dd = dual_basis(Lattice(dual.basis()));
    CHECK(same_point_set(lat.basis(), dd.basis()));
  }
}

TEST_CASE("normalize_basis scales an axis-aligned basis and shears b into [0,1)") {
  const auto [norm, tf] = normalize_basis(DualLattice(cols(2.0, 0.0, 2.6, 1.4)));
  const auto [b, d] = norm.normalized();
  CHECK(b == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(d == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(tf.scale == doctest::Approx(0.5));
  CHECK(tf.rotation == doctest::Approx(0.0));
  CHECK(!tf.swapped);
}

TEST_CASE("normalize_basis leaves a normal form untouched") {
  const auto [norm, tf] = normalize_basis(DualLattice(cols(1.0, 0.0, 0.5, std::sqrt(3.0) / 2)));
  const auto [b, d] = norm.normalized();
  CHECK(b == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  CHECK(tf.is_identity());
}

TEST_CASE("normalize_basis flips a downward e2 and shears") {
  const auto [norm, tf] = normalize_basis(DualLattice(cols(1.0, 0.0, 1.5, -0.8)));
  const auto [b, d] = norm.normalized();
  CHECK(b == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(tf.flipped);
}

TEST_CASE("normalize_basis output spans a rotated+scaled copy of the input") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int done = 0;
  while (done < 8) {
    Eigen::Matrix2d m = cols(u(rng), u(rng), u(rng), u(rng));
    if (std::abs(m.determinant()) < 0.2) continue;
    ++done;
    const DualLattice dual(m);
    const auto [norm, tf] = normalize_basis(dual);

    Eigen::Matrix2d rot;
    rot << std::cos(-tf.rotation), -std::sin(-tf.rotation), std::sin(-tf.rotation),
        std::cos(-tf.rotation);
    const Eigen::Matrix2d mapped = tf.scale * rot * m;

    // 5x5 patch of integer combinations of the mapped input must land on the
    // normalized lattice and vice versa.
    CHECK(same_point_set(mapped, norm.basis()));
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) {
        const Eigen::Vector2d pt = mapped * Eigen::Vector2d(i, j);
        const Eigen::Vector2d sol = norm.basis().inverse() * pt;
        CHECK(std::abs(sol.x() - std::round(sol.x())) <= 1e-9);
        CHECK(std::abs(sol.y() - std::round(sol.y())) <= 1e-9);
      }
  }
}

TEST_CASE("honeycomb pq configuration") {
  const ThreeLineConfig cfg = pq_config({0, 1}, {-1, 1});
  CHECK(cfg.b == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cfg.d == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
  CHECK(cfg.delta == 1);
  CHECK(cfg.dGcd == 1);
  CHECK(cfg.p2Prime == 1);
  CHECK(cfg.q2Prime == 1);
}

TEST_CASE("pq_config evaluates b and d for p=(0,1), q=(-1,2)") {
  const ThreeLineConfig cfg = pq_config({0, 1}, {-1, 2});
  CHECK(cfg.b == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(cfg.d == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-14));
  CHECK(cfg.delta == 1);  // 0*2 - 1*(-1)
  CHECK(cfg.q2Prime == 2);
}

TEST_CASE("pq_config rejects q1 >= 0 and names the inequality") {
  try {
    pq_config({1, 1}, {1, 1});
    FAIL("expected a validation error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("q1 < 0") != std::string::npos);
  }
}

TEST_CASE("pq_config rejects non-coprime pairs") {
  CHECK_THROWS_AS(pq_config({2, 4}, {-1, 1}), validation_error);
  CHECK_THROWS_AS(pq_config({0, 1}, {-2, 4}), validation_error);
}

TEST_CASE("three generator nodes sit on lines at mutual angle pi/3") {
  for (const ThreeLineConfig& cfg :
       {pq_config({0, 1}, {-1, 1}), pq_config({0, 1}, {-1, 2}), pq_config({1, 3}, {-1, 2})}) {
    const Eigen::Vector2d g0 = cfg.line0_node();
    const Eigen::Vector2d g1 = cfg.line1_node();
    const Eigen::Vector2d g2 = cfg.line2_node();
    auto line_angle = [](const Eigen::Vector2d& v) {
      double a = std::atan2(v.y(), v.x());
      if (a < 0) a += M_PI;
      return a;
    };
    CHECK(line_angle(g1) - line_angle(g0) == doctest::Approx(M_PI / 3).epsilon(1e-9));
    CHECK(line_angle(g2) - line_angle(g1) == doctest::Approx(M_PI / 3).epsilon(1e-9));
  }
}

TEST_CASE("gcd split and delta for a stride configuration") {
  const ThreeLineConfig cfg = pq_config({1, 3}, {-1, 2});
  CHECK(cfg.dGcd == 1);
  CHECK(cfg.p2Prime == 3);
  CHECK(cfg.q2Prime == 2);
  CHECK(cfg.delta == 5);  // 1*2 - 3*(-1)
}

TEST_CASE("line_of identifies the three lines and their strides") {
  const ThreeLineConfig cfg = pq_config({1, 3}, {-1, 2});
  int stride = 0;
  CHECK(cfg.line_of(4, 0, &stride) == 0);
  CHECK(stride == 4);
  CHECK(cfg.line_of(2, 6, &stride) == 1);  // 2 * p
  CHECK(stride == 2);
  CHECK(cfg.line_of(-3, -9, &stride) == 1);
  CHECK(stride == -3);
  CHECK(cfg.line_of(-2, 4, &stride) == 2);  // 2 * q
  CHECK(stride == 2);
  CHECK(cfg.line_of(1, 1) == -1);
  CHECK(cfg.line_of(0, 0) == -1);
}
