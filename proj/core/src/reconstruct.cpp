#include "ktorus/reconstruct.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "ktorus/errors.hpp"

namespace ktorus {

VWPair compute_vw(const FourierField& f, const KillingConstants& k) {
  CoeffMap vc, wc;
  vc[{0, 0}] = Complex{-k.a2, 0.0};
  wc[{0, 0}] = Complex{k.a1, 0.0};
  for (const auto& [n, lam] : f.coeffs()) {
    if (n.is_origin()) continue;
    const Eigen::Vector2d m = f.node(n);
    const double m1 = m.x(), m2 = m.y();
    const double nn = m.squaredNorm();
    // The multipliers are even in n, so parity is preserved exactly.
    vc[n] = ((-k.c2 * m1 * m1 + 2.0 * k.c1 * m1 * m2 + k.c2 * m2 * m2) / nn) * lam;
    wc[n] = ((k.c1 * m1 * m1 + 2.0 * k.c2 * m1 * m2 - k.c1 * m2 * m2) / nn) * lam;
  }
  return VWPair{FourierField::real_field_full(f.dual(), vc),
                FourierField::real_field_full(f.dual(), wc)};
}

ReconstructChecks residual_checks(const FourierField& f, const KillingConstants& k,
                                  const VWPair& vw) {
  using Op = FourierField::DiffOp;
  const FourierField lx = f.diff(Op::dx);
  const FourierField ly = f.diff(Op::dy);

  const FourierField cr1 =
      vw.v.diff(Op::dx) - vw.w.diff(Op::dy) - (lx.scaled(-k.c2) + ly.scaled(k.c1));
  const FourierField cr2 =
      vw.v.diff(Op::dy) + vw.w.diff(Op::dx) - (lx.scaled(k.c1) + ly.scaled(k.c2));
  const FourierField curl =
      convolve(f, vw.v).diff(Op::dy) - convolve(f, vw.w).diff(Op::dx);

  ReconstructChecks checks;
  checks.cr_norm = std::sqrt(std::pow(cr1.coeff_norm(), 2) + std::pow(cr2.coeff_norm(), 2));
  checks.consistency_norm = curl.coeff_norm();
  return checks;
}

Potential integrate_u(const FourierField& f, const VWPair& vw, double tol) {
  const FourierField lv = convolve(f, vw.v);
  const FourierField lw = convolve(f, vw.w);

  Potential u{{lv.zero_mode().real(), lw.zero_mode().real()},
              FourierField::real_field(f.dual(), {})};

  CoeffMap uc;
  std::set<NodeIndex> nodes;
  for (const auto& [n, v] : lv.coeffs()) nodes.insert(n);
  for (const auto& [n, v] : lw.coeffs()) nodes.insert(n);

  double worst = 0.0;
  NodeIndex worst_node{0, 0};
  for (const NodeIndex n : nodes) {
    if (n.is_origin() || !n.lex_positive()) continue;
    const Eigen::Vector2d m = f.node(n);
    const Complex a = lv.coeff(n), b = lw.coeff(n);
    // Curl-free means m2*a - m1*b = 0; track the worst violation.
    const double mismatch = std::abs(m.y() * a - m.x() * b);
    if (mismatch > worst) {
      worst = mismatch;
      worst_node = n;
    }
    const Complex im{0.0, 1.0};
    const Complex val = std::abs(m.x()) >= std::abs(m.y()) ? a / (im * m.x()) : b / (im * m.y());
    uc[n] = val;
  }
  if (worst > tol) {
    std::ostringstream os;
    os << "integrate_u: consistency violated (|m2 (lambda v) - m1 (lambda w)| = " << worst
       << " > tol " << tol << " at node (" << worst_node.n1 << "," << worst_node.n2 << "))";
    throw check_failure(os.str(), {worst_node.n1, worst_node.n2});
  }
  u.periodic = FourierField::real_field(f.dual(), uc);
  return u;
}

double hessian_residual(const FourierField& f, const KillingConstants& k,
                        const Potential& u) {
  using Op = FourierField::DiffOp;
  const FourierField lx = f.diff(Op::dx), ly = f.diff(Op::dy);
  const FourierField ux = u.periodic.diff(Op::dx), uy = u.periodic.diff(Op::dy);
  const FourierField uxx = ux.diff(Op::dx), uyy = uy.diff(Op::dy), uxy = ux.diff(Op::dy);

  const Eigen::Matrix2d primal = f.dual().primal_basis();
  const int grid = 32;
  double max_resid = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Eigen::Vector2d p =
          primal * Eigen::Vector2d(double(i) / grid, double(j) / grid);
      const double lam = f.evaluate(p.x(), p.y());
      if (!(lam > 0.0)) {
        std::ostringstream os;
        os << "hessian_residual: conformal factor not positive at grid point (" << p.x()
           << "," << p.y() << "): lambda = " << lam;
        throw check_failure(os.str());
      }
      const double lamx = lx.evaluate(p.x(), p.y());
      const double lamy = ly.evaluate(p.x(), p.y());
      const double vux = u.linear.first + ux.evaluate(p.x(), p.y());
      const double vuy = u.linear.second + uy.evaluate(p.x(), p.y());
      const double vuxx = uxx.evaluate(p.x(), p.y());
      const double vuyy = uyy.evaluate(p.x(), p.y());
      const double vuxy = uxy.evaluate(p.x(), p.y());

      const double e1 = vuxx - vuyy - (lamx * vux - lamy * vuy) / lam -
                        lam * (-k.c2 * lamx + k.c1 * lamy);
      const double e2 = 2.0 * vuxy - (lamy * vux + lamx * vuy) / lam -
                        lam * (k.c1 * lamx + k.c2 * lamy);
      max_resid = std::max({max_resid, std::abs(e1), std::abs(e2)});
    }
  }
  return max_resid;
}

}  // namespace ktorus
