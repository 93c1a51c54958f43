#include "ktorus/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ktorus/errors.hpp"

namespace ktorus {

namespace {

constexpr Complex kI{0.0, 1.0};

int band_of(const CoeffMap& coeffs) {
  int band = 0;
  for (const auto& [n, v] : coeffs) band = std::max({band, std::abs(n.n1), std::abs(n.n2)});
  return band;
}

void drop_exact_zeros(CoeffMap& coeffs) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    if (it->second == Complex{0.0, 0.0}) {
      it = coeffs.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace

FourierField::FourierField(const DualLattice& dual, CoeffMap coeffs, bool exempt)
    : dual_(dual), coeffs_(std::move(coeffs)), parity_exempt_(exempt) {
  drop_exact_zeros(coeffs_);
  band_ = band_of(coeffs_);
}

FourierField FourierField::real_field(const DualLattice& dual, const CoeffMap& half) {
  CoeffMap full;
  for (const auto& [n, v] : half) {
    if (n.is_origin()) {
      if (v.imag() != 0.0)
        throw validation_error("FourierField: zero mode of a real field must be real");
      full[n] = v;
    } else if (n.lex_positive()) {
      full[n] = v;
      full[-n] = std::conj(v);
    } else {
      throw validation_error(
          "FourierField: half-spectrum data must use lexicographically positive indices");
    }
  }
  return FourierField(dual, std::move(full), /*exempt=*/false);
}

FourierField FourierField::real_field_full(const DualLattice& dual, const CoeffMap& full) {
  for (const auto& [n, v] : full) {
    auto it = full.find(-n);
    const Complex mirror = it == full.end() ? Complex{0.0, 0.0} : it->second;
    if (mirror != std::conj(v)) {
      std::ostringstream os;
      os << "FourierField: parity violated at (" << n.n1 << "," << n.n2 << ")";
      throw validation_error(os.str());
    }
  }
  return FourierField(dual, full, /*exempt=*/false);
}

FourierField FourierField::complex_field(const DualLattice& dual, const CoeffMap& full) {
  return FourierField(dual, full, /*exempt=*/true);
}

Complex FourierField::coeff(NodeIndex n) const {
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? Complex{0.0, 0.0} : it->second;
}

Complex FourierField::evaluate_complex(double x, double y) const {
  Complex sum{0.0, 0.0};
  for (const auto& [n, v] : coeffs_) {
    const Eigen::Vector2d m = node(n);
    sum += v * std::exp(kI * (m.x() * x + m.y() * y));
  }
  return sum;
}

double FourierField::evaluate(double x, double y) const {
  return evaluate_complex(x, y).real();
}

FourierField FourierField::diff(DiffOp op) const {
  CoeffMap out;
  for (const auto& [n, v] : coeffs_) {
    const Eigen::Vector2d m = node(n);
    Complex mult;
    switch (op) {
      case DiffOp::dx: mult = kI * m.x(); break;
      case DiffOp::dy: mult = kI * m.y(); break;
      case DiffOp::dz: mult = 0.5 * kI * Complex{m.x(), -m.y()}; break;
      case DiffOp::dzbar: mult = 0.5 * kI * Complex{m.x(), m.y()}; break;
      case DiffOp::laplacian: mult = -(m.x() * m.x() + m.y() * m.y()); break;
      case DiffOp::inverse_laplacian:
        mult = n.is_origin() ? 0.0 : -1.0 / (m.x() * m.x() + m.y() * m.y());
        break;
    }
    out[n] = mult * v;
  }
  // dx, dy, laplacian and its inverse keep real fields real; dz/dzbar do not.
  const bool exempt =
      parity_exempt_ || op == DiffOp::dz || op == DiffOp::dzbar;
  return FourierField(dual_, std::move(out), exempt);
}

FourierField convolve(const FourierField& f, const FourierField& g) {
  CoeffMap out;
  for (const auto& [kf, vf] : f.coeffs_) {
    for (const auto& [kg, vg] : g.coeffs_) {
      out[kf + kg] += vf * vg;
    }
  }
  const bool exempt = f.parity_exempt_ || g.parity_exempt_;
  if (!exempt) {
    // Parity holds mathematically; re-mirror so it holds bit-exactly.
    for (auto& [n, v] : out) {
      if (n.is_origin()) {
        v = Complex{v.real(), 0.0};
      } else if (!n.lex_positive()) {
        v = std::conj(out[-n]);
      }
    }
  }
  return FourierField(f.dual_, std::move(out), exempt);
}

FourierField FourierField::operator+(const FourierField& o) const {
  CoeffMap out = coeffs_;
  for (const auto& [n, v] : o.coeffs_) out[n] += v;
  return FourierField(dual_, std::move(out), parity_exempt_ || o.parity_exempt_);
}

FourierField FourierField::operator-(const FourierField& o) const {
  CoeffMap out = coeffs_;
  for (const auto& [n, v] : o.coeffs_) out[n] -= v;
  return FourierField(dual_, std::move(out), parity_exempt_ || o.parity_exempt_);
}

FourierField FourierField::scaled(Complex s) const {
  CoeffMap out;
  for (const auto& [n, v] : coeffs_) out[n] = s * v;
  return FourierField(dual_, std::move(out), parity_exempt_ || s.imag() != 0.0);
}

FourierField FourierField::shifted_zero_mode(double lambda0) const {
  CoeffMap out = coeffs_;
  out[{0, 0}] += lambda0;
  return FourierField(dual_, std::move(out), parity_exempt_);
}

FourierField FourierField::symmetrized() const {
  CoeffMap out;
  for (const auto& [n, v] : coeffs_) {
    if (n.is_origin()) {
      out[n] = Complex{v.real(), 0.0};
    } else if (n.lex_positive()) {
      const Complex avg = 0.5 * (v + std::conj(coeff(-n)));
      out[n] = avg;
      out[-n] = std::conj(avg);
    }
  }
  return FourierField(dual_, std::move(out), /*exempt=*/false);
}

double FourierField::coeff_norm() const {
  double s = 0.0;
  for (const auto& [n, v] : coeffs_) s += std::norm(v);
  return std::sqrt(s);
}

double FourierField::coeff_max_abs() const {
  double m = 0.0;
  for (const auto& [n, v] : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

SpectrumReport spectrum_analysis(const FourierField& f) {
  SpectrumReport rep;
  rep.zero_mode = f.zero_mode();
  std::vector<Eigen::Vector2d> nodes;
  for (const auto& [n, v] : f.coeffs()) {
    if (n.is_origin()) continue;
    rep.spectrum.push_back(n);
    rep.decay_sum += std::abs(v);
    nodes.push_back(f.node(n));
  }
  if (!nodes.empty()) {
    bool one_line = true;
    const Eigen::Vector2d ref = nodes.front();
    for (const auto& m : nodes) {
      const double cross = ref.x() * m.y() - ref.y() * m.x();
      if (std::abs(cross) > 1e-12 * ref.norm() * m.norm()) {
        one_line = false;
        break;
      }
    }
    if (one_line) {
      Eigen::Vector2d dir = ref.normalized();
      if (dir.y() < 0.0 || (dir.y() == 0.0 && dir.x() < 0.0)) dir = -dir;
      rep.one_dimensional = dir;
    }
  }
  return rep;
}

}  // namespace ktorus
