#pragma once

// Shared fixture builders and independent oracles for the test suites.  The
// oracles here recompute expected values by routes independent of the library
// code they check (direct sums, brute-force enumeration, step-by-step linear
// solves).

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "ktorus/errors.hpp"
#include "ktorus/field.hpp"
#include "ktorus/killing.hpp"
#include "ktorus/lattice.hpp"
#include "ktorus/trilinear.hpp"

namespace ktest {

using ktorus::Complex;
using ktorus::CoeffMap;
using ktorus::DualLattice;
using ktorus::FourierField;
using ktorus::NodeIndex;

inline std::string fixture(const std::string& name) {
  return std::string(KTORUS_FIXTURE_DIR) + "/" + name;
}

inline DualLattice unit_square() { return DualLattice(0.0, 1.0); }

/// lambda = zero + 2*amp*cos(x) on the square lattice (coeff amp at (+-1,0)).
inline FourierField cos_x_field(double zero, double amp) {
  CoeffMap half{{{0, 0}, Complex{zero, 0.0}}, {{1, 0}, Complex{amp, 0.0}}};
  return FourierField::real_field(unit_square(), half);
}

inline FourierField liouville_field() {
  CoeffMap half{{{0, 0}, Complex{1.0, 0.0}},
                {{1, 0}, Complex{0.15, 0.0}},
                {{0, 1}, Complex{0.1, 0.0}}};
  return FourierField::real_field(unit_square(), half);
}

/// Deterministic parity-valid field with random complex coefficients on the
/// full band square (zero mode `zero`).
inline FourierField random_field(const DualLattice& dual, int band, double scale,
                                 std::mt19937_64& rng, double zero = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CoeffMap half;
  half[{0, 0}] = Complex{zero, 0.0};
  for (int n1 = -band; n1 <= band; ++n1)
    for (int n2 = -band; n2 <= band; ++n2) {
      const NodeIndex n{n1, n2};
      if (n.lex_positive()) half[n] = Complex{u(rng), u(rng)};
    }
  return FourierField::real_field(dual, half);
}

/// Oracle: the quadratic-system residual at one node, written as the direct
/// double loop over physical coordinates with no shared code.
inline Complex direct_residual(const FourierField& f, const ktorus::KillingConstants& k,
                               NodeIndex n) {
  const Eigen::Vector2d m = f.node(n);
  Complex lhs{0.0, 0.0};
  for (const auto& [kk, vk] : f.coeffs()) {
    if (kk.is_origin()) continue;
    const Complex other = f.coeff({n.n1 - kk.n1, n.n2 - kk.n2});
    if (other == Complex{0.0, 0.0}) continue;
    const Eigen::Vector2d K = f.node(kk);
    const double num =
        k.c1 * (-m.x() * K.x() * K.x() + 2.0 * m.y() * K.x() * K.y() + m.x() * K.y() * K.y()) +
        k.c2 * (-m.y() * K.x() * K.x() - 2.0 * m.x() * K.x() * K.y() + m.y() * K.y() * K.y());
    lhs += num / (K.x() * K.x() + K.y() * K.y()) * vk * other;
  }
  return lhs - (k.a1 * m.x() + k.a2 * m.y()) * f.coeff(n);
}

/// Random parity-valid triple sequence with entries of the given scale.
inline ktorus::TripleSequence random_sequence(int band, double scale,
                                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  ktorus::TripleSequence s(band);
  for (int n = 1; n <= band; ++n)
    s.set(n, Complex{u(rng), u(rng)}, Complex{u(rng), u(rng)}, Complex{u(rng), u(rng)});
  return s;
}

/// Extends a sequence by one index with explicit frontier values.
inline ktorus::TripleSequence extended(const ktorus::TripleSequence& s, Complex x,
                                       Complex y, Complex z) {
  ktorus::TripleSequence t(s.band() + 1);
  for (int n = 1; n <= s.band(); ++n) t.set(n, s.x(n), s.y(n), s.z(n));
  t.set(s.band() + 1, x, y, z);
  return t;
}

struct ExtensionTrialOutcome {
  bool found_solution = false;    // residual <= 1e-8 and decay sum <= 0.5
  bool one_dimensional = false;   // at most one sequence nonzero (1e-8)
  bool all_nonzero = false;       // all of x,y,z carry energy
  double residual_max = 0.0;
  double decay_sum = 0.0;
  ktorus::TripleSequence seq{1};
};

/// Brute-force oracle for the desk-scale trichotomy experiment: draw a random
/// frontier at n = 1 (one, two, or three sequences populated, by seed), grow
/// the prefix with least-squares extension steps, then judge the final band.
inline ExtensionTrialOutcome run_extension_trial(std::uint64_t seed, int band,
                                                 double scale = 0.12) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  auto draw = [&] { return Complex{u(rng), u(rng)}; };

  ktorus::TripleSequence seq(1);
  switch (seed % 3) {
    case 0: {  // single line, random axis
      const Complex v = draw();
      const int axis = int(seed / 3) % 3;
      seq.set(1, axis == 0 ? v : Complex{0, 0}, axis == 1 ? v : Complex{0, 0},
              axis == 2 ? v : Complex{0, 0});
      break;
    }
    case 1: {  // two sequences populated
      const int off = int(seed / 3) % 3;
      seq.set(1, off == 0 ? Complex{0, 0} : draw(), off == 1 ? Complex{0, 0} : draw(),
              off == 2 ? Complex{0, 0} : draw());
      break;
    }
    default:
      seq.set(1, draw(), draw(), draw());
      break;
  }

  ExtensionTrialOutcome out;
  for (int n = 2; n <= band; ++n) {
    ktorus::ExtendResult step;
    try {
      step = ktorus::extend_and_classify(seq, n);
    } catch (const ktorus::validation_error&) {
      break;  // prefix already stopped being a solution
    }
    if (!step.candidate) break;
    seq = extended(seq, (*step.candidate)[0], (*step.candidate)[1], (*step.candidate)[2]);
    if (step.status == ktorus::ExtendStatus::overdetermined_inconsistent) break;
  }

  out.seq = seq;
  if (seq.band() >= 2) {
    const ktorus::TrilinearResidual r = ktorus::trilinear_residual(seq);
    out.residual_max = r.max_abs;
  }
  out.decay_sum = seq.decay_sum();
  out.found_solution =
      seq.band() == band && out.residual_max <= 1e-8 && out.decay_sum <= 0.5;
  const std::array<double, 3> peak = seq.max_abs();
  const int live = (peak[0] > 1e-8) + (peak[1] > 1e-8) + (peak[2] > 1e-8);
  out.one_dimensional = live <= 1;
  out.all_nonzero = live == 3;
  return out;
}

}  // namespace ktest
