#include "ktorus/trilinear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ktorus/errors.hpp"

namespace ktorus {

namespace {
constexpr Complex kI{0.0, 1.0};
}

TripleSequence::TripleSequence(int band) : band_(band) {
  if (band < 1) throw validation_error("TripleSequence: band must be >= 1");
  x_.assign(band, Complex{0.0, 0.0});
  y_.assign(band, Complex{0.0, 0.0});
  z_.assign(band, Complex{0.0, 0.0});
}

TripleSequence::TripleSequence(std::vector<Complex> x, std::vector<Complex> y,
                               std::vector<Complex> z)
    : band_(static_cast<int>(x.size())), x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
  if (band_ < 1 || y_.size() != x_.size() || z_.size() != x_.size())
    throw validation_error("TripleSequence: sequences must share a band >= 1");
}

Complex TripleSequence::at(const std::vector<Complex>& v, int n) const {
  if (n == 0 || std::abs(n) > band_)
    throw validation_error("TripleSequence: index outside the band");
  return n > 0 ? v[n - 1] : std::conj(v[-n - 1]);
}

void TripleSequence::set(int n, Complex x, Complex y, Complex z) {
  if (n < 1 || n > band_) throw validation_error("TripleSequence: set index outside band");
  x_[n - 1] = x;
  y_[n - 1] = y;
  z_[n - 1] = z;
}

double TripleSequence::decay_sum() const {
  double s = 0.0;
  for (int i = 0; i < band_; ++i) s += std::abs(x_[i]) + std::abs(y_[i]) + std::abs(z_[i]);
  return s;
}

std::array<double, 3> TripleSequence::max_abs() const {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (int i = 0; i < band_; ++i) {
    m[0] = std::max(m[0], std::abs(x_[i]));
    m[1] = std::max(m[1], std::abs(y_[i]));
    m[2] = std::max(m[2], std::abs(z_[i]));
  }
  return m;
}

TrilinearResidual trilinear_residual(const TripleSequence& s) {
  const int N = s.band();
  if (N < 2) throw validation_error("trilinear_residual: band must be >= 2");
  TrilinearResidual res;
  double sq = 0.0;
  for (int n1 = -N; n1 <= N; ++n1) {
    if (n1 == 0) continue;
    for (int n2 = -N; n2 <= N; ++n2) {
      const int n12 = n1 + n2;
      if (n2 == 0 || n12 == 0 || std::abs(n12) > N) continue;
      const Complex r = s.x(n1) * s.y(n2) - s.x(n12) * s.z(n2) + s.y(n12) * s.z(-n1);
      sq += std::norm(r);
      ++res.equation_count;
      const double a = std::abs(r);
      if (a > res.max_abs) {
        res.max_abs = a;
        res.worst = {n1, n2};
      }
    }
  }
  res.l2 = std::sqrt(sq);
  return res;
}

TripleSequence apply_symmetry(const TripleSequence& s, int which) {
  const int N = s.band();
  TripleSequence out(N);
  for (int n = 1; n <= N; ++n) {
    switch (which) {
      case 1: out.set(n, s.x(-n), s.y(-n), s.z(-n)); break;
      case 2: out.set(n, s.y(n), s.x(n), -s.z(-n)); break;
      case 3: out.set(n, s.z(n), s.y(n), s.x(n)); break;
      case 4: out.set(n, -s.x(-n), s.z(n), s.y(n)); break;
      default: throw validation_error("apply_symmetry: which must be 1..4");
    }
  }
  return out;
}

std::vector<ModuliViolation> moduli_relations(const TripleSequence& s, double solution_tol,
                                              double violation_tol) {
  const TrilinearResidual r = trilinear_residual(s);
  if (r.max_abs > solution_tol) {
    std::ostringstream os;
    os << "moduli_relations: relations only derived for solutions (residual max "
       << r.max_abs << " > " << solution_tol << ")";
    throw validation_error(os.str());
  }
  std::vector<ModuliViolation> out;
  auto diff = [&](int relation, int k) {
    switch (relation) {
      case 0: return std::norm(s.z(k)) - std::norm(s.y(k));
      case 1: return std::norm(s.x(k)) - std::norm(s.z(k));
      default: return std::norm(s.x(k)) - std::norm(s.y(k));
    }
  };
  for (int n = 2; n <= s.band(); ++n) {
    const Complex head[3] = {s.x(n), s.y(n), s.z(n)};
    for (int m = 1; m <= n - 1; ++m) {
      for (int relation = 0; relation < 3; ++relation) {
        const double gap =
            std::abs((diff(relation, m) - diff(relation, n - m)) * head[relation]);
        if (gap > violation_tol) out.push_back({m, n, relation, gap});
      }
    }
  }
  return out;
}

ThreeLineSpectrum::ThreeLineSpectrum(const ThreeLineConfig& cfg, int band, double zero_mode)
    : cfg_(cfg), band_(band), zero_mode_(zero_mode) {
  if (band < 1) throw validation_error("ThreeLineSpectrum: band must be >= 1");
}

Complex ThreeLineSpectrum::at(const std::map<int, Complex>& m, int n) const {
  if (n == 0 || std::abs(n) > band_)
    throw validation_error("ThreeLineSpectrum: index outside the band");
  auto it = m.find(n);
  return it == m.end() ? Complex{0.0, 0.0} : it->second;
}

ThreeLineSpectrum ThreeLineSpectrum::from_half(const ThreeLineConfig& cfg, int band,
                                               double zero_mode,
                                               const std::vector<Complex>& alpha,
                                               const std::vector<Complex>& beta,
                                               const std::vector<Complex>& gamma) {
  if (static_cast<int>(alpha.size()) > band || static_cast<int>(beta.size()) > band ||
      static_cast<int>(gamma.size()) > band)
    throw validation_error("ThreeLineSpectrum: sequence data exceeds the band");
  ThreeLineSpectrum s(cfg, band, zero_mode);
  auto mirror = [](std::map<int, Complex>& dst, const std::vector<Complex>& src) {
    for (size_t i = 0; i < src.size(); ++i) {
      dst[int(i) + 1] = src[i];
      dst[-int(i) - 1] = std::conj(src[i]);
    }
  };
  mirror(s.alpha_, alpha);
  mirror(s.beta_, beta);
  mirror(s.gamma_, gamma);
  return s;
}

ThreeLineSpectrum ThreeLineSpectrum::from_full(const ThreeLineConfig& cfg, int band,
                                               double zero_mode,
                                               const std::map<int, Complex>& alpha,
                                               const std::map<int, Complex>& beta,
                                               const std::map<int, Complex>& gamma) {
  ThreeLineSpectrum s(cfg, band, zero_mode);
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.gamma_ = gamma;

  bool even = true, odd = true;
  for (const auto* seq : {&s.alpha_, &s.beta_, &s.gamma_}) {
    for (const auto& [n, v] : *seq) {
      if (n == 0 || std::abs(n) > band)
        throw validation_error("ThreeLineSpectrum: index outside the band");
      auto it = seq->find(-n);
      const Complex mirror = it == seq->end() ? Complex{0.0, 0.0} : it->second;
      if (mirror != std::conj(v)) even = false;
      if (mirror != -std::conj(v)) odd = false;
    }
  }
  if (even) {
    s.parity_ = Parity::conjugate_even;
  } else if (odd) {
    s.parity_ = Parity::conjugate_odd;
  } else {
    throw validation_error("ThreeLineSpectrum: mixed conjugation symmetry");
  }
  return s;
}

FourierField ThreeLineSpectrum::to_field() const {
  if (parity_ != Parity::conjugate_even)
    throw validation_error("ThreeLineSpectrum: only conjugate-even data defines a real field");
  CoeffMap full;
  full[{0, 0}] = Complex{zero_mode_, 0.0};
  for (int n = -band_; n <= band_; ++n) {
    if (n == 0) continue;
    if (alpha(n) != Complex{0.0, 0.0}) full[{n, 0}] += alpha(n);
    if (beta(n) != Complex{0.0, 0.0}) full[{n * cfg_.p[0], n * cfg_.p[1]}] += beta(n);
    if (gamma(n) != Complex{0.0, 0.0}) full[{n * cfg_.q[0], n * cfg_.q[1]}] += gamma(n);
  }
  return FourierField::real_field_full(cfg_.dual(), full);
}

ReductionResult reduce_from_lines(const ThreeLineSpectrum& spec) {
  const ThreeLineConfig& cfg = spec.config();
  const int band = spec.band();
  const int delta = cfg.delta, q2p = cfg.q2Prime, p2p = cfg.p2Prime;

  const int seq_band = std::min({band / delta, band / q2p, band / p2p});
  if (seq_band < 1) {
    std::ostringstream os;
    os << "reduce_from_lines: band " << band << " too small for strides (delta=" << delta
       << ", q2'=" << q2p << ", p2'=" << p2p << ")";
    throw validation_error(os.str());
  }

  // Conjugate-even spectra need the extra i to keep the triple conjugate
  // symmetric; conjugate-odd spectra are already aligned with the literal
  // index-weighted variables.  Either divisor yields the same |residual|.
  const Complex unit =
      spec.parity() == ThreeLineSpectrum::Parity::conjugate_even ? kI : Complex{1.0, 0.0};

  TripleSequence seq(seq_band);
  for (int n = 1; n <= seq_band; ++n) {
    seq.set(n, spec.alpha(delta * n) / (unit * double(n)),
            spec.beta(q2p * n) / (unit * double(n)),
            spec.gamma(p2p * n) / (unit * double(n)));
  }

  ReductionResult out{std::move(seq), {}, {}, {}};

  // beta_{n1} gamma_{n2} = 0 off the divisibility set.
  for (int n1 = -band; n1 <= band; ++n1) {
    if (n1 == 0 || n1 % q2p == 0) continue;
    for (int n2 = -band; n2 <= band; ++n2) {
      if (n2 == 0 || n2 % p2p == 0) continue;
      out.eq348.max_abs =
          std::max(out.eq348.max_abs, std::abs(spec.beta(n1) * spec.gamma(n2)));
      ++out.eq348.equation_count;
    }
  }

  // Mixed relation for n1 not divisible by delta (vacuous when |delta| = 1).
  if (std::abs(delta) > 1) {
    for (int n1 = -band; n1 <= band; ++n1) {
      if (n1 == 0 || n1 % delta == 0) continue;
      for (int n2 = -band / std::max({q2p, p2p, 1}); n2 <= band / std::max({q2p, p2p, 1});
           ++n2) {
        if (n2 == 0) continue;
        const int shifted = n1 + delta * n2;
        if (std::abs(shifted) > band || std::abs(q2p * n2) > band ||
            std::abs(p2p * n2) > band)
          continue;
        const Complex val =
            (spec.alpha(n1) / double(n1)) * (spec.beta(q2p * n2) / double(n2)) -
            (spec.alpha(shifted) / double(shifted)) * (spec.gamma(p2p * n2) / double(n2));
        out.eq355.max_abs = std::max(out.eq355.max_abs, std::abs(val));
        ++out.eq355.equation_count;
      }
    }
  }

  // The trilinear relation in line variables; coincides with residual(seq).
  for (int n1 = -seq_band; n1 <= seq_band; ++n1) {
    if (n1 == 0) continue;
    for (int n2 = -seq_band; n2 <= seq_band; ++n2) {
      const int n12 = n1 + n2;
      if (n2 == 0 || n12 == 0 || std::abs(n12) > seq_band) continue;
      const Complex val =
          (spec.alpha(delta * n1) / double(n1)) * (spec.beta(q2p * n2) / double(n2)) -
          (spec.alpha(delta * n12) / double(n12)) * (spec.gamma(p2p * n2) / double(n2)) -
          (spec.beta(q2p * n12) / double(n12)) * (spec.gamma(-p2p * n1) / double(n1));
      out.eq360.max_abs = std::max(out.eq360.max_abs, std::abs(val));
      ++out.eq360.equation_count;
    }
  }
  return out;
}

ExtendResult extend_and_classify(const TripleSequence& prefix, int n, double consistency_tol,
                                 double zero_tol) {
  if (n < 2) throw validation_error("extend_and_classify: n must be >= 2");
  if (prefix.band() < n - 1)
    throw validation_error("extend_and_classify: prefix band smaller than n-1");
  if (prefix.band() >= 2) {
    const TrilinearResidual r = trilinear_residual(prefix);
    if (r.max_abs > 1e-12)
      throw validation_error("extend_and_classify: prefix does not satisfy the system");
  }

  // Unknowns u = (Re x_n, Im x_n, Re y_n, Im y_n, Re z_n, Im z_n).
  const int rows = 6 * (n - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, 6);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);

  // A complex coefficient c acting on the unknown w contributes the 2x2 block
  // [Re c, -Im c; Im c, Re c]; acting on conj(w) it contributes
  // [Re c, Im c; Im c, -Re c].
  auto put = [&](int row, int col, Complex c, bool conjugated) {
    A(row, col) += c.real();
    A(row, col + 1) += conjugated ? c.imag() : -c.imag();
    A(row + 1, col) += c.imag();
    A(row + 1, col + 1) += conjugated ? -c.real() : c.real();
  };
  auto put_rhs = [&](int row, Complex v) {
    rhs(row) += v.real();
    rhs(row + 1) += v.imag();
  };

  for (int m = 1; m <= n - 1; ++m) {
    const int r42 = 6 * (m - 1);
    const int r43 = r42 + 2;
    const int r44 = r42 + 4;
    // z_{n-m} x_n - z_{-m} y_n = x_m y_{n-m}
    put(r42, 0, prefix.z(n - m), false);
    put(r42, 2, -prefix.z(-m), false);
    put_rhs(r42, prefix.x(m) * prefix.y(n - m));
    // x_{-m} y_n - x_{n-m} z_n = -y_{n-m} z_m
    put(r43, 2, prefix.x(-m), false);
    put(r43, 4, -prefix.x(n - m), false);
    put_rhs(r43, -prefix.y(n - m) * prefix.z(m));
    // y_{-m} x_n + y_{n-m} conj(z_n) = x_{n-m} z_{-m}
    put(r44, 0, prefix.y(-m), false);
    put(r44, 4, prefix.y(n - m), true);
    put_rhs(r44, prefix.x(n - m) * prefix.z(-m));
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  svd.setThreshold(1e-12);
  const Eigen::VectorXd u = svd.solve(rhs);
  const double solve_residual = (A * u - rhs).norm();
  const bool rank_deficient = smax == 0.0 || svd.rank() < 6;

  ExtendResult res;
  res.solve_residual = solve_residual;
  if (solve_residual > consistency_tol) {
    res.status = ExtendStatus::overdetermined_inconsistent;
  } else if (rank_deficient) {
    res.status = ExtendStatus::underdetermined;
  } else {
    res.status = ExtendStatus::consistent;
  }

  if (res.status != ExtendStatus::overdetermined_inconsistent) {
    res.candidate = std::array<Complex, 3>{Complex{u(0), u(1)}, Complex{u(2), u(3)},
                                           Complex{u(4), u(5)}};
  }

  if (res.status == ExtendStatus::overdetermined_inconsistent) {
    res.classification.kind = ExtendClassification::Kind::violates_system;
    const Eigen::VectorXd gap = A * u - rhs;
    int worst_row = 0;
    gap.cwiseAbs().maxCoeff(&worst_row);
    const int m = worst_row / 6 + 1;
    switch ((worst_row % 6) / 2) {
      case 0: res.classification.witness = std::array<int, 2>{m, n - m}; break;
      case 1: res.classification.witness = std::array<int, 2>{-m, n}; break;
      default: res.classification.witness = std::array<int, 2>{n, -m}; break;
    }
    return res;
  }

  // Trichotomy over the extended prefix.
  std::array<double, 3> peak = prefix.max_abs();
  for (int i = 0; i < 3; ++i) peak[i] = std::max(peak[i], std::abs((*res.candidate)[i]));
  const bool nz[3] = {peak[0] > zero_tol, peak[1] > zero_tol, peak[2] > zero_tol};
  const int live = int(nz[0]) + int(nz[1]) + int(nz[2]);
  if (live <= 1) {
    res.classification.kind = ExtendClassification::Kind::one_dimensional;
    if (nz[0]) res.classification.axis = Axis::x;
    if (nz[1]) res.classification.axis = Axis::y;
    if (nz[2]) res.classification.axis = Axis::z;
  } else {
    res.classification.kind = ExtendClassification::Kind::non_one_dimensional;
  }
  return res;
}

GrowthResult growth_recursion(double r0, const std::vector<double>& phases, int steps) {
  if (!(r0 > 0.0 && r0 < 1.0))
    throw validation_error("growth_recursion: r0 must lie in (0,1)");
  if (steps < 1) throw validation_error("growth_recursion: steps must be >= 1");
  if (phases.empty()) throw validation_error("growth_recursion: phases must be nonempty");
  if (phases.size() != 1 && static_cast<int>(phases.size()) < steps)
    throw validation_error("growth_recursion: phases must broadcast or cover all steps");

  GrowthResult out;
  out.r.reserve(steps + 1);
  out.r.push_back(r0);
  double prod = 1.0;
  for (int k = 0; k < steps; ++k) {
    const double r = out.r.back();
    const double theta = phases.size() == 1 ? phases[0] : phases[k];
    const double next =
        r / (1.0 - r * r) * std::sqrt(1.0 - 2.0 * r * std::cos(theta) + r * r);
    if (!(next < 1.0)) {
      std::ostringstream os;
      os << "growth_recursion: iterate " << k + 1 << " reached r = " << next
         << " >= 1 (outside the contraction regime)";
      throw check_failure(os.str());
    }
    if (next * (1.0 + r) < r * (1.0 - 1e-12)) out.ratio_bound_ok = false;
    out.r.push_back(next);
    prod *= 1.0 + next;
  }
  out.lower_bound = r0 / prod;
  return out;
}

}  // namespace ktorus
