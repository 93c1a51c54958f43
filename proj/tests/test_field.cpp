#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "ktorus/errors.hpp"
#include "ktorus/field.hpp"
#include "ktorus/lattice.hpp"

using namespace ktorus;
using ktest::cos_x_field;
using ktest::random_field;
using ktest::unit_square;

namespace {

FourierField honeycomb_generators_field(double zero, double amp) {
  const ThreeLineConfig cfg = honeycomb_config();
  CoeffMap half{{{0, 0}, Complex{zero, 0.0}},
                {{1, 0}, Complex{amp, 0.0}},
                {{0, 1}, Complex{amp, 0.0}},    // p generator
                {{1, -1}, Complex{amp, 0.0}}};  // -q generator (lex-positive rep)
  return FourierField::real_field(cfg.dual(), half);
}

double rel_diff(Complex a, Complex b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("evaluate sums the cosine series") {
  const FourierField f = cos_x_field(1.0, 0.5);  // 1 + cos x
  CHECK(f.evaluate(0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.evaluate(M_PI, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("evaluate on the honeycomb generator field") {
  const FourierField f = honeycomb_generators_field(1.0, 0.1);
  CHECK(f.evaluate(0.0, 0.0) == doctest::Approx(1.6).epsilon(1e-13));
}

TEST_CASE("inverse laplacian inverts the cosine and kills constants") {
  const FourierField f = cos_x_field(0.0, 0.5);  // cos x
  const FourierField g = f.diff(FourierField::DiffOp::inverse_laplacian);
  CHECK(g.coeff({1, 0}) == Complex{-0.5, 0.0});
  CHECK(g.coeff({-1, 0}) == Complex{-0.5, 0.0});

  const FourierField c = cos_x_field(3.0, 0.0);
  CHECK(c.diff(FourierField::DiffOp::inverse_laplacian).coeffs().empty());
}

TEST_CASE("dz acts as multiplication by i/2 on e^{ix}") {
  CoeffMap one{{{1, 0}, Complex{1.0, 0.0}}};
  const FourierField e = FourierField::complex_field(unit_square(), one);
  const FourierField de = e.diff(FourierField::DiffOp::dz);
  CHECK(de.parity_exempt());
  CHECK(rel_diff(de.coeff({1, 0}), Complex{0.0, 0.5}) <= 1e-15);
}

TEST_CASE("laplacian after inverse laplacian is the identity on zero-mean fields") {
  std::mt19937_64 rng(5);
  const FourierField f = random_field(unit_square(), 3, 0.3, rng, /*zero=*/0.0);
  const FourierField g = f.diff(FourierField::DiffOp::inverse_laplacian)
                             .diff(FourierField::DiffOp::laplacian);
  for (const auto& [n, v] : f.coeffs()) CHECK(rel_diff(g.coeff(n), v) <= 1e-15);
}

TEST_CASE("dz dzbar equals a quarter of the laplacian") {
  std::mt19937_64 rng(6);
  const FourierField f = random_field(unit_square(), 3, 0.3, rng);
  const FourierField lhs = f.diff(FourierField::DiffOp::dz).diff(FourierField::DiffOp::dzbar);
  const FourierField rhs = f.diff(FourierField::DiffOp::laplacian).scaled(0.25);
  for (const auto& [n, v] : rhs.coeffs()) CHECK(rel_diff(lhs.coeff(n), v) <= 1e-14);
}

TEST_CASE("convolution squares 1 + cos x") {
  const FourierField f = cos_x_field(1.0, 0.5);
  const FourierField sq = convolve(f, f);
  CHECK(sq.coeff({0, 0}) == Complex{1.5, 0.0});
  CHECK(sq.coeff({1, 0}) == Complex{1.0, 0.0});
  CHECK(sq.coeff({-1, 0}) == Complex{1.0, 0.0});
  CHECK(sq.coeff({2, 0}) == Complex{0.25, 0.0});
  CHECK(sq.coeff({-2, 0}) == Complex{0.25, 0.0});
}

TEST_CASE("the constant one is the convolution identity") {
  std::mt19937_64 rng(7);
  const FourierField f = random_field(unit_square(), 2, 0.4, rng);
  CoeffMap one{{{0, 0}, Complex{1.0, 0.0}}};
  const FourierField id = FourierField::real_field(unit_square(), one);
  const FourierField g = convolve(f, id);
  for (const auto& [n, v] : f.coeffs()) CHECK(g.coeff(n) == v);
}

TEST_CASE("cos x times cos y spreads onto the four diagonal nodes") {
  CoeffMap cx{{{1, 0}, Complex{0.5, 0.0}}};
  CoeffMap cy{{{0, 1}, Complex{0.5, 0.0}}};
  const FourierField f = FourierField::real_field(unit_square(), cx);
  const FourierField g = FourierField::real_field(unit_square(), cy);
  const FourierField prod = convolve(f, g);
  for (const NodeIndex n : {NodeIndex{1, 1}, {1, -1}, {-1, 1}, {-1, -1}})
    CHECK(prod.coeff(n) == Complex{0.25, 0.0});
}

TEST_CASE("convolution equals the pointwise product") {
  std::mt19937_64 rng(8);
  const FourierField f = random_field(unit_square(), 2, 0.4, rng);
  const FourierField g = random_field(unit_square(), 2, 0.4, rng);
  const FourierField prod = convolve(f, g);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng), y = u(rng);
    const double expect = f.evaluate(x, y) * g.evaluate(x, y);
    const double got = prod.evaluate(x, y);
    CHECK(std::abs(got - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("convolution is commutative and associative") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const FourierField f = random_field(unit_square(), 2, 0.4, rng);
    const FourierField g = random_field(unit_square(), 2, 0.4, rng);
    const FourierField h = random_field(unit_square(), 1, 0.4, rng);

    const FourierField fg = convolve(f, g);
    const FourierField gf = convolve(g, f);
    for (const auto& [n, v] : fg.coeffs()) CHECK(rel_diff(gf.coeff(n), v) <= 1e-12);

    const FourierField l = convolve(fg, h);
    const FourierField r = convolve(f, convolve(g, h));
    for (const auto& [n, v] : l.coeffs()) CHECK(rel_diff(r.coeff(n), v) <= 1e-12);
  }
}

TEST_CASE("parity makes evaluation real at random points") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const FourierField f = random_field(unit_square(), 3, 0.5, rng);
  double scale = 0.0;
  for (const auto& [n, v] : f.coeffs()) scale += std::abs(v);
  for (int i = 0; i < 100; ++i) {
    const Complex val = f.evaluate_complex(u(rng), u(rng));
    CHECK(std::abs(val.imag()) <= 1e-10 * scale);
  }
}

TEST_CASE("spectrum of 1 + cos x is the antipodal x pair") {
  const SpectrumReport rep = spectrum_analysis(cos_x_field(1.0, 0.5));
  CHECK(rep.spectrum.size() == 2);
  REQUIRE(rep.one_dimensional.has_value());
  CHECK(rep.one_dimensional->isApprox(Eigen::Vector2d(1, 0), 1e-12));
  CHECK(rep.zero_mode == Complex{1.0, 0.0});
  CHECK(rep.decay_sum == doctest::Approx(1.0));
}

TEST_CASE("two independent directions break one-dimensionality") {
  const SpectrumReport rep = spectrum_analysis(ktest::liouville_field());
  CHECK(rep.spectrum.size() == 4);
  CHECK(!rep.one_dimensional.has_value());
}

TEST_CASE("the honeycomb generator field has a six-node spectrum") {
  const SpectrumReport rep = spectrum_analysis(honeycomb_generators_field(1.0, 0.1));
  CHECK(rep.spectrum.size() == 6);
  CHECK(!rep.one_dimensional.has_value());
}

TEST_CASE("a diagonal line is detected with its direction") {
  CoeffMap half{{{0, 0}, Complex{1.0, 0.0}},
                {{1, 1}, Complex{0.1, 0.0}},
                {{2, 2}, Complex{0.05, 0.0}}};
  const FourierField f = FourierField::real_field(unit_square(), half);
  const SpectrumReport rep = spectrum_analysis(f);
  REQUIRE(rep.one_dimensional.has_value());
  CHECK(rep.one_dimensional->isApprox(Eigen::Vector2d(1, 1).normalized(), 1e-12));
}

TEST_CASE("construction rejects parity violations") {
  CoeffMap bad{{{1, 0}, Complex{0.1, 0.0}}, {{-1, 0}, Complex{0.2, 0.0}}};
  CHECK_THROWS_AS(FourierField::real_field_full(unit_square(), bad), validation_error);

  CoeffMap neg{{{-1, 0}, Complex{0.1, 0.0}}};
  CHECK_THROWS_AS(FourierField::real_field(unit_square(), neg), validation_error);

  CoeffMap badzero{{{0, 0}, Complex{1.0, 0.5}}};
  CHECK_THROWS_AS(FourierField::real_field(unit_square(), badzero), validation_error);
}

TEST_CASE("support bound tracks the largest stored index") {
  std::mt19937_64 rng(12);
  const FourierField f = random_field(unit_square(), 3, 0.4, rng);
  CHECK(f.support_bound() == 3);
  const FourierField sq = convolve(f, f);
  CHECK(sq.support_bound() <= 6);
}
