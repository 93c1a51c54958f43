#include "ktorus/killing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ktorus/errors.hpp"

namespace ktorus {

namespace {

/// Equation index set: every node reachable as k + l with k,l in the support
/// and k != 0, united with the support itself.
std::set<NodeIndex> equation_set(const CoeffMap& coeffs) {
  std::set<NodeIndex> eqs;
  for (const auto& [k, vk] : coeffs) {
    eqs.insert(k);
    if (k.is_origin()) continue;
    for (const auto& [l, vl] : coeffs) eqs.insert(k + l);
  }
  eqs.insert({0, 0});
  return eqs;
}

double kernel_c1(const Eigen::Vector2d& m, const Eigen::Vector2d& K) {
  return -m.x() * K.x() * K.x() + 2.0 * m.y() * K.x() * K.y() + m.x() * K.y() * K.y();
}

double kernel_c2(const Eigen::Vector2d& m, const Eigen::Vector2d& K) {
  return -m.y() * K.x() * K.x() - 2.0 * m.x() * K.x() * K.y() + m.y() * K.y() * K.y();
}

}  // namespace

ResidualReport make_report(std::map<NodeIndex, Complex> per_equation) {
  ResidualReport rep;
  rep.per_equation = std::move(per_equation);
  double sq = 0.0;
  for (const auto& [n, r] : rep.per_equation) {
    sq += std::norm(r);
    const double a = std::abs(r);
    if (a > rep.max_abs) {
      rep.max_abs = a;
      rep.worst = n;
    }
  }
  rep.norm = std::sqrt(sq);
  rep.equation_count = static_cast<int>(rep.per_equation.size());
  return rep;
}

ResidualReport system_residual(const FourierField& f, const KillingConstants& k) {
  const auto& coeffs = f.coeffs();
  std::map<NodeIndex, Complex> per;
  for (const NodeIndex n : equation_set(coeffs)) {
    if (n.is_origin()) {
      per[n] = Complex{0.0, 0.0};  // both sides vanish identically
      continue;
    }
    const Eigen::Vector2d m = f.node(n);
    Complex lhs{0.0, 0.0};
    for (const auto& [kk, vk] : coeffs) {
      if (kk.is_origin()) continue;
      auto other = coeffs.find(n - kk);
      if (other == coeffs.end()) continue;
      const Eigen::Vector2d K = f.node(kk);
      const double num = k.c1 * kernel_c1(m, K) + k.c2 * kernel_c2(m, K);
      lhs += (num / K.squaredNorm()) * vk * other->second;
    }
    per[n] = lhs - (k.a1 * m.x() + k.a2 * m.y()) * f.coeff(n);
  }
  return make_report(std::move(per));
}

FourierField pde_residual(const FourierField& f, const KillingConstants& k) {
  using Op = FourierField::DiffOp;
  const Complex a = k.a_complex();
  const Complex c = k.c_complex();

  const FourierField lzz = f.diff(Op::dz).diff(Op::dz).diff(Op::inverse_laplacian);
  const FourierField lbb = f.diff(Op::dzbar).diff(Op::dzbar).diff(Op::inverse_laplacian);

  CoeffMap az{{{0, 0}, a}};
  CoeffMap azb{{{0, 0}, std::conj(a)}};
  const FourierField inner_z = lzz.scaled(c) + FourierField::complex_field(f.dual(), az);
  const FourierField inner_zb =
      lbb.scaled(std::conj(c)) + FourierField::complex_field(f.dual(), azb);

  const FourierField total =
      convolve(f, inner_z).diff(Op::dz) + convolve(f, inner_zb).diff(Op::dzbar);
  return total.symmetrized();
}

Complex pde_system_factor() {
  static const Complex factor = [] {
    const DualLattice square(0.0, 1.0);
    CoeffMap half{{{0, 0}, Complex{1.0, 0.0}}, {{1, 0}, Complex{0.5, 0.0}}};
    const FourierField ref = FourierField::real_field(square, half);
    const KillingConstants k{0.0, 0.0, 1.0, 0.0};
    const ResidualReport sys = system_residual(ref, k);
    const FourierField pde = pde_residual(ref, k);
    const NodeIndex probe{2, 0};
    return pde.coeff(probe) / sys.per_equation.at(probe);
  }();
  return factor;
}

double psi1(int n1, int n2, int k1, int k2, double b, double d) {
  const double D = (k1 + b * k2) * (k1 + b * k2) + d * d * k2 * k2;
  const double num = n2 * double(k1) * k1 + 2.0 * (n1 + 2.0 * b * n2) * k1 * k2 +
                     (2.0 * b * n1 + (3.0 * b * b - d * d) * n2) * double(k2) * k2;
  return d * num / D;
}

double psi2(int n1, int n2, int k1, int k2, double b, double d) {
  const double D = (k1 + b * k2) * (k1 + b * k2) + d * d * k2 * k2;
  const double num = -(n1 + b * n2) * double(k1) * k1 +
                     2.0 * (-b * n1 + (d * d - b * b) * n2) * k1 * k2 +
                     ((d * d - b * b) * n1 + b * (3.0 * d * d - b * b) * n2) * double(k2) * k2;
  return num / D;
}

double psi(int n1, int n2, int k1, int k2, double c1, double c2, double b, double d) {
  return c1 * psi1(n1, n2, k1, k2, b, d) + c2 * psi2(n1, n2, k1, k2, b, d);
}

KillingConstants section3_to_raw_constants(const ThreeLineConfig& cfg, double c1, double c2) {
  KillingConstants k;
  k.c1 = c1 / cfg.d;
  k.c2 = 2.0 * c2;
  return k;
}

double phi_line0(int n1, int n2, const ThreeLineConfig& cfg, double c1, double c2) {
  const double ratio = double(cfg.p[0]) / cfg.p[1] + double(cfg.q[0]) / cfg.q[1];
  return -2.0 * c2 * n1 + (c1 + c2 * ratio) * n2;
}

double phi(int n1, int n2, std::array<int, 2> pa, std::array<int, 2> pb) {
  const double det = double(pa[0]) * pb[1] - double(pa[1]) * pb[0];
  return pb[1] * (pa[1] * n1 - pa[0] * n2) / det;
}

ResidualReport integer_system_residual(const FourierField& f, double b, double d,
                                       const KillingConstants& k) {
  const auto& coeffs = f.coeffs();
  std::map<NodeIndex, Complex> per;
  for (const NodeIndex n : equation_set(coeffs)) {
    if (n.is_origin()) {
      per[n] = Complex{0.0, 0.0};
      continue;
    }
    Complex lhs{0.0, 0.0};
    for (const auto& [kk, vk] : coeffs) {
      if (kk.is_origin()) continue;
      auto other = coeffs.find(n - kk);
      if (other == coeffs.end()) continue;
      lhs += psi(n.n1, n.n2, kk.n1, kk.n2, k.c1, k.c2, b, d) * vk * other->second;
    }
    per[n] = lhs - (k.a1 * n.n1 + k.a2 * n.n2) * f.coeff(n);
  }
  return make_report(std::move(per));
}

ResidualReport integer_system_residual(const FourierField& f, const ThreeLineConfig& cfg,
                                       const KillingConstants& k) {
  return integer_system_residual(f, cfg.b, cfg.d, k);
}

namespace {

/// Columns of the linear map (c1,c2,a1,a2) -> residual vector.
struct ConstantColumns {
  std::vector<Complex> c1, c2, a1, a2;
};

ConstantColumns residual_columns(const FourierField& f, const std::set<NodeIndex>& eqs) {
  const auto& coeffs = f.coeffs();
  ConstantColumns cols;
  for (const NodeIndex n : eqs) {
    Complex s1{0.0, 0.0}, s2{0.0, 0.0};
    if (!n.is_origin()) {
      const Eigen::Vector2d m = f.node(n);
      for (const auto& [kk, vk] : coeffs) {
        if (kk.is_origin()) continue;
        auto other = coeffs.find(n - kk);
        if (other == coeffs.end()) continue;
        const Eigen::Vector2d K = f.node(kk);
        const Complex prod = vk * other->second;
        s1 += (kernel_c1(m, K) / K.squaredNorm()) * prod;
        s2 += (kernel_c2(m, K) / K.squaredNorm()) * prod;
      }
      cols.a1.push_back(-m.x() * f.coeff(n));
      cols.a2.push_back(-m.y() * f.coeff(n));
    } else {
      cols.a1.push_back({0.0, 0.0});
      cols.a2.push_back({0.0, 0.0});
    }
    cols.c1.push_back(s1);
    cols.c2.push_back(s2);
  }
  return cols;
}

Eigen::Matrix4d normal_matrix(const ConstantColumns& cols) {
  const std::vector<Complex>* c[4] = {&cols.c1, &cols.c2, &cols.a1, &cols.a2};
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      double s = 0.0;
      for (size_t r = 0; r < c[i]->size(); ++r)
        s += ((*c[i])[r] * std::conj((*c[j])[r])).real();
      g(i, j) = g(j, i) = s;
    }
  return g;
}

BestConstantsResult solve_constants(const Eigen::Matrix4d& g) {
  const double scale = g.norm();
  if (!(scale > 0.0) || g.topLeftCorner<2, 2>().norm() <= 1e-14 * std::max(scale, 1.0))
    throw validation_error("best_constants: degenerate normal matrix (constant field?)");

  const Eigen::Matrix2d gcc = g.topLeftCorner<2, 2>();
  const Eigen::Matrix2d gca = g.topRightCorner<2, 2>();
  const Eigen::Matrix2d gaa = g.bottomRightCorner<2, 2>();

  // Pseudoinverse of gaa: one-dimensional spectra leave a null a-direction.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> aeig(gaa);
  Eigen::Matrix2d gaa_pinv = Eigen::Matrix2d::Zero();
  const double athresh = 1e-13 * std::max(aeig.eigenvalues().maxCoeff(), 0.0) + 1e-300;
  for (int i = 0; i < 2; ++i) {
    if (aeig.eigenvalues()(i) > athresh) {
      gaa_pinv += aeig.eigenvectors().col(i) * aeig.eigenvectors().col(i).transpose() /
                  aeig.eigenvalues()(i);
    }
  }

  const Eigen::Matrix2d schur = gcc - gca * gaa_pinv * gca.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ceig(schur);
  Eigen::Vector2d cvec = ceig.eigenvectors().col(0);  // smallest eigenvalue
  if (cvec.x() < 0.0 || (cvec.x() == 0.0 && cvec.y() < 0.0)) cvec = -cvec;
  if (std::abs(cvec.x()) < 1e-14 && cvec.y() < 0.0) cvec = -cvec;

  const Eigen::Vector2d avec = -gaa_pinv * gca.transpose() * cvec;

  BestConstantsResult res;
  res.constants = KillingConstants{avec.x(), avec.y(), cvec.x(), cvec.y()};
  return res;
}

}  // namespace

BestConstantsResult best_constants(const FourierField& f) {
  const auto eqs = equation_set(f.coeffs());
  const auto cols = residual_columns(f, eqs);
  BestConstantsResult res = solve_constants(normal_matrix(cols));
  res.residual_norm = system_residual(f, res.constants).norm;
  return res;
}

BestConstantsResult best_constants_joint(const FourierField& f, double lambda0) {
  const FourierField g = f.shifted_zero_mode(lambda0);
  const auto eqs_f = equation_set(f.coeffs());
  const auto eqs_g = equation_set(g.coeffs());
  const Eigen::Matrix4d gram =
      normal_matrix(residual_columns(f, eqs_f)) + normal_matrix(residual_columns(g, eqs_g));
  BestConstantsResult res = solve_constants(gram);
  const double nf = system_residual(f, res.constants).norm;
  const double ng = system_residual(g, res.constants).norm;
  res.residual_norm = std::sqrt(nf * nf + ng * ng);
  return res;
}

double cubic_form(const Eigen::Vector2d& m, double c1, double c2) {
  return c1 * (m.x() * m.x() - 3.0 * m.y() * m.y()) * m.x() +
         c2 * (3.0 * m.x() * m.x() - m.y() * m.y()) * m.y();
}

CubicReport cubic_analysis(const std::vector<Eigen::Vector2d>& spectrum,
                           std::optional<Eigen::Vector2d> c) {
  if (spectrum.empty()) throw validation_error("cubic_analysis: empty spectrum");

  CubicReport rep;

  // Rows of the homogeneous system, normalized to unit length.
  Eigen::Matrix2d gram = Eigen::Matrix2d::Zero();
  for (const auto& m : spectrum) {
    Eigen::Vector2d row{(m.x() * m.x() - 3.0 * m.y() * m.y()) * m.x(),
                        (3.0 * m.x() * m.x() - m.y() * m.y()) * m.y()};
    const double len = row.norm();
    if (len == 0.0) continue;  // only the origin produces a zero row
    row /= len;
    gram += row * row.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram);
  if (eig.eigenvalues()(0) <= 1e-18 * std::max(1.0, eig.eigenvalues()(1))) {
    Eigen::Vector2d dir = eig.eigenvectors().col(0);
    if (dir.x() < 0.0 || (dir.x() == 0.0 && dir.y() < 0.0)) dir = -dir;
    rep.admissible_directions.push_back(dir);
  }

  if (c) {
    bool ok = true;
    const double cn = c->norm();
    for (const auto& m : spectrum) {
      const double row_scale = std::pow(m.norm(), 3);
      if (std::abs(cubic_form(m, c->x(), c->y())) > 1e-9 * row_scale * cn) {
        ok = false;
        break;
      }
    }
    rep.given_admissible = ok;
  }

  // Line family test: all node angles congruent mod pi/3.
  std::vector<double> angles;
  for (const auto& m : spectrum) {
    double a = std::atan2(m.y(), m.x());
    while (a < 0.0) a += M_PI;
    while (a >= M_PI) a -= M_PI;
    angles.push_back(a);
  }
  const double third = M_PI / 3.0;
  bool fits = true;
  double alpha = std::fmod(angles.front(), third);
  for (double a : angles) {
    double r = std::fmod(a, third) - alpha;
    r -= third * std::round(r / third);
    if (std::abs(r) > 1e-9) {
      fits = false;
      break;
    }
  }
  if (fits) {
    if (alpha < 0.0) alpha += third;
    rep.three_lines = std::array<double, 3>{alpha, alpha + third, alpha + 2.0 * third};
  }
  return rep;
}

FourierField cubic_field(const FourierField& f, const KillingConstants& k) {
  using Op = FourierField::DiffOp;
  const Complex c = k.c_complex();
  const FourierField lzzz = f.diff(Op::dz).diff(Op::dz).diff(Op::dz);
  const FourierField lbbb = f.diff(Op::dzbar).diff(Op::dzbar).diff(Op::dzbar);
  return (lzzz.scaled(c) + lbbb.scaled(std::conj(c))).symmetrized();
}

ShiftTestResult shift_test(const FourierField& f, double lambda0,
                           const KillingConstants& k) {
  ShiftTestResult res;
  res.base_norm = system_residual(f, k).norm;
  res.shifted_norm = system_residual(f.shifted_zero_mode(lambda0), k).norm;
  res.cubic_norm = cubic_field(f, k).coeff_norm();
  return res;
}

}  // namespace ktorus
