#include "ktorus/search.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "ktorus/errors.hpp"

namespace ktorus {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kBarrierEps = 1e-12;

/// One free complex coefficient: the field value at `rep`, mirrored by
/// conjugation at -rep.  `line` tags the spectral line (three-line problems).
struct Param {
  NodeIndex rep;
  int line = -1;
};

struct Parametrization {
  std::vector<Param> params;
  std::vector<NodeIndex> equations;  // fixed equation set, origin excluded
  std::map<NodeIndex, int> rep_of;   // node -> signed (param+1), negative for -rep
};

Parametrization build_parametrization(const SearchProblem& p) {
  if (p.band < 1) throw validation_error("search: band must be >= 1");
  Parametrization par;
  if (p.is_three_line()) {
    const auto& cfg = std::get<ThreeLineConfig>(p.cfg);
    for (int line = 0; line < 3; ++line) {
      const std::array<int, 2> gen = line == 0 ? std::array<int, 2>{1, 0}
                                   : line == 1 ? cfg.p
                                               : cfg.q;
      for (int n = 1; n <= p.band; ++n)
        par.params.push_back({NodeIndex{n * gen[0], n * gen[1]}, line});
    }
  } else {
    for (int n1 = -p.band; n1 <= p.band; ++n1)
      for (int n2 = -p.band; n2 <= p.band; ++n2) {
        const NodeIndex n{n1, n2};
        if (n.lex_positive()) par.params.push_back({n, -1});
      }
  }
  for (size_t i = 0; i < par.params.size(); ++i) {
    par.rep_of[par.params[i].rep] = int(i) + 1;
    par.rep_of[-par.params[i].rep] = -(int(i) + 1);
  }

  // Fixed equation list from the full parametrized support.
  std::set<NodeIndex> support;
  support.insert({0, 0});
  for (const Param& q : par.params) {
    support.insert(q.rep);
    support.insert(-q.rep);
  }
  std::set<NodeIndex> eqs;
  for (const NodeIndex k : support) {
    if (k.is_origin()) continue;
    eqs.insert(k);
    for (const NodeIndex l : support) eqs.insert(k + l);
  }
  eqs.erase({0, 0});  // identically satisfied
  par.equations.assign(eqs.begin(), eqs.end());
  return par;
}

/// Coefficient lookup: theta holds (Re, Im) per parameter; the zero mode is
/// fixed at zm.
Complex coeff_at(const Parametrization& par, const Eigen::VectorXd& theta, double zm,
                 NodeIndex n) {
  if (n.is_origin()) return Complex{zm, 0.0};
  auto it = par.rep_of.find(n);
  if (it == par.rep_of.end()) return Complex{0.0, 0.0};
  const int signed_idx = it->second;
  const int i = std::abs(signed_idx) - 1;
  const Complex rho{theta(2 * i), theta(2 * i + 1)};
  return signed_idx > 0 ? rho : std::conj(rho);
}

FourierField field_of(const SearchProblem& p, const Parametrization& par,
                      const Eigen::VectorXd& theta) {
  CoeffMap full;
  full[{0, 0}] = Complex{p.zero_mode, 0.0};
  for (size_t i = 0; i < par.params.size(); ++i) {
    const Complex rho{theta(2 * i), theta(2 * i + 1)};
    full[par.params[i].rep] = rho;
    full[-par.params[i].rep] = std::conj(rho);
  }
  return FourierField::real_field_full(p.dual(), full);
}

Eigen::VectorXd theta_of(const Parametrization& par, const FourierField& f) {
  Eigen::VectorXd theta(2 * par.params.size());
  for (size_t i = 0; i < par.params.size(); ++i) {
    const Complex v = f.coeff(par.params[i].rep);
    theta(2 * i) = v.real();
    theta(2 * i + 1) = v.imag();
  }
  return theta;
}

double kernel_c1(const Eigen::Vector2d& m, const Eigen::Vector2d& K) {
  return -m.x() * K.x() * K.x() + 2.0 * m.y() * K.x() * K.y() + m.x() * K.y() * K.y();
}
double kernel_c2(const Eigen::Vector2d& m, const Eigen::Vector2d& K) {
  return -m.y() * K.x() * K.x() - 2.0 * m.x() * K.x() * K.y() + m.y() * K.y() * K.y();
}

/// Precomputed quadratic structure of one equation's residual.
struct EquationGeometry {
  NodeIndex n;
  Eigen::Vector2d m;  // physical coordinates
  struct Pair {
    NodeIndex k, l;   // k != 0, k + l = n, both in the support
    double g1, g2;    // c1/c2 kernel parts over |K|^2
  };
  std::vector<Pair> pairs;
};

std::vector<EquationGeometry> build_geometry(const SearchProblem& p,
                                             const Parametrization& par) {
  const DualLattice dual = p.dual();
  std::set<NodeIndex> support;
  support.insert({0, 0});
  for (const Param& q : par.params) {
    support.insert(q.rep);
    support.insert(-q.rep);
  }
  std::vector<EquationGeometry> geo;
  geo.reserve(par.equations.size());
  for (const NodeIndex n : par.equations) {
    EquationGeometry eq;
    eq.n = n;
    eq.m = dual.node(n.n1, n.n2);
    for (const NodeIndex k : support) {
      if (k.is_origin()) continue;
      const NodeIndex l = n - k;
      if (!support.count(l)) continue;
      const Eigen::Vector2d K = dual.node(k.n1, k.n2);
      eq.pairs.push_back({k, l, kernel_c1(eq.m, K) / K.squaredNorm(),
                          kernel_c2(eq.m, K) / K.squaredNorm()});
    }
    geo.push_back(std::move(eq));
  }
  return geo;
}

struct ResidualStack {
  Eigen::VectorXd r;   // real stacked residual (+ optional barrier row)
  Eigen::MatrixXd J;   // Jacobian w.r.t. theta
  double objective = 0.0;
};

/// Residual and Jacobian rows of the quadratic system for the zero-mode value
/// zm, written into rows [row0, row0 + 2*|eqs|).
void emit_system_rows(const Parametrization& par, const std::vector<EquationGeometry>& geo,
                      const Eigen::VectorXd& theta, double zm, const KillingConstants& kc,
                      int row0, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
  std::map<NodeIndex, Complex> dual_slot;  // dR/d lambda_m accumulator
  for (size_t e = 0; e < geo.size(); ++e) {
    const EquationGeometry& eq = geo[e];
    dual_slot.clear();
    Complex resid{0.0, 0.0};
    for (const auto& pr : eq.pairs) {
      const double kernel = kc.c1 * pr.g1 + kc.c2 * pr.g2;
      const Complex vk = coeff_at(par, theta, zm, pr.k);
      const Complex vl = coeff_at(par, theta, zm, pr.l);
      resid += kernel * vk * vl;
      dual_slot[pr.k] += kernel * vl;
      dual_slot[pr.l] += kernel * vk;
    }
    const double am = kc.a1 * eq.m.x() + kc.a2 * eq.m.y();
    resid -= am * coeff_at(par, theta, zm, eq.n);
    dual_slot[eq.n] -= am;

    const int row = row0 + 2 * int(e);
    r(row) = resid.real();
    r(row + 1) = resid.imag();
    for (const auto& [node, c] : dual_slot) {
      auto it = par.rep_of.find(node);
      if (it == par.rep_of.end()) continue;  // zero mode or off-support
      const int i = std::abs(it->second) - 1;
      const Complex dre = c;                                     // d lambda/d Re = 1
      const Complex dim = it->second > 0 ? c * kI : -c * kI;     // d lambda/d Im = +-i
      J(row, 2 * i) += dre.real();
      J(row + 1, 2 * i) += dre.imag();
      J(row, 2 * i + 1) += dim.real();
      J(row + 1, 2 * i + 1) += dim.imag();
    }
  }
}

std::array<double, 3> line_energies_theta(const Parametrization& par,
                                          const Eigen::VectorXd& theta) {
  std::array<double, 3> e{0.0, 0.0, 0.0};
  for (size_t i = 0; i < par.params.size(); ++i) {
    if (par.params[i].line < 0) continue;
    const double sq = theta(2 * i) * theta(2 * i) + theta(2 * i + 1) * theta(2 * i + 1);
    e[par.params[i].line] += 2.0 * sq;  // both index signs
  }
  return e;
}

/// Barrier value eta/(eps + pi) and d pi/d theta for the active measure.
struct Barrier {
  double pi = 0.0;
  Eigen::VectorXd dpi;
};

Barrier barrier_measure(const SearchProblem& p, const Parametrization& par,
                        const Eigen::VectorXd& theta) {
  Barrier b;
  b.dpi = Eigen::VectorXd::Zero(theta.size());
  if (p.is_three_line()) {
    const std::array<double, 3> e = line_energies_theta(par, theta);
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int c) { return e[a] < e[c]; });
    const int i = order[0], j = order[1];
    b.pi = e[i] * e[j];
    for (size_t k = 0; k < par.params.size(); ++k) {
      const int line = par.params[k].line;
      double w = 0.0;
      if (line == i) w = e[j];
      else if (line == j) w = e[i];
      else continue;
      b.dpi(2 * k) += w * 4.0 * theta(2 * k);
      b.dpi(2 * k + 1) += w * 4.0 * theta(2 * k + 1);
    }
    return b;
  }
  // General lattice: smallest off-line energy over lines through support reps.
  std::vector<Eigen::Vector2d> dirs;
  const DualLattice dual = p.dual();
  for (const Param& q : par.params) {
    Eigen::Vector2d m = dual.node(q.rep.n1, q.rep.n2).normalized();
    if (m.y() < 0.0 || (m.y() == 0.0 && m.x() < 0.0)) m = -m;
    bool known = false;
    for (const auto& dd : dirs)
      if ((dd - m).norm() < 1e-9) known = true;
    if (!known) dirs.push_back(m);
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_d;
  for (const auto& dir : dirs) {
    double off = 0.0;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(theta.size());
    for (size_t k = 0; k < par.params.size(); ++k) {
      const Eigen::Vector2d m = dual.node(par.params[k].rep.n1, par.params[k].rep.n2);
      const double cross = dir.x() * m.y() - dir.y() * m.x();
      if (std::abs(cross) <= 1e-12 * m.norm()) continue;  // on the line
      off += 2.0 * (theta(2 * k) * theta(2 * k) + theta(2 * k + 1) * theta(2 * k + 1));
      d(2 * k) = 4.0 * theta(2 * k);
      d(2 * k + 1) = 4.0 * theta(2 * k + 1);
    }
    if (off < best) {
      best = off;
      best_d = d;
    }
  }
  b.pi = best;
  b.dpi = best_d;
  return b;
}

ResidualStack assemble(const SearchProblem& p, const Parametrization& par,
                       const std::vector<EquationGeometry>& geo, const Eigen::VectorXd& theta,
                       const KillingConstants& kc, std::optional<double> shift) {
  const int sys_rows = 2 * int(geo.size());
  const int copies = shift ? 2 : 1;
  const int rows = sys_rows * copies + (p.eta > 0.0 ? 1 : 0);

  ResidualStack st;
  st.r = Eigen::VectorXd::Zero(rows);
  st.J = Eigen::MatrixXd::Zero(rows, theta.size());

  emit_system_rows(par, geo, theta, p.zero_mode, kc, 0, st.r, st.J);
  if (shift)
    emit_system_rows(par, geo, theta, p.zero_mode + *shift, kc, sys_rows, st.r, st.J);

  if (p.eta > 0.0) {
    const Barrier b = barrier_measure(p, par, theta);
    const double denom = kBarrierEps + b.pi;
    const double val = std::sqrt(p.eta / denom);
    const int row = rows - 1;
    st.r(row) = val;
    st.J.row(row) = (-0.5 * std::sqrt(p.eta) * std::pow(denom, -1.5)) * b.dpi.transpose();
  }
  st.objective = st.r.squaredNorm();
  return st;
}

SearchResult run_search(const SearchProblem& p, const FourierField& init,
                        std::optional<double> shift) {
  const Parametrization par = build_parametrization(p);
  const std::vector<EquationGeometry> geo = build_geometry(p, par);

  Eigen::VectorXd theta = theta_of(par, init);
  auto fit_constants = [&](const Eigen::VectorXd& th) {
    const FourierField f = field_of(p, par, th);
    return shift ? best_constants_joint(f, *shift) : best_constants(f);
  };

  KillingConstants kc = fit_constants(theta).constants;
  ResidualStack st = assemble(p, par, geo, theta, kc, shift);

  SearchResult res{field_of(p, par, theta), kc, 0.0, std::nullopt, {}, false};
  double damping = p.damping_init;

  for (int iter = 0; iter < p.max_iters; ++iter) {
    const Eigen::VectorXd grad = st.J.transpose() * st.r;
    res.trace.push_back({iter, st.objective, std::sqrt(std::max(0.0, st.objective)), damping});
    if (grad.norm() <= p.grad_tol) {
      res.converged = true;
      break;
    }

    const Eigen::MatrixXd jtj = st.J.transpose() * st.J;
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += damping;
      const Eigen::VectorXd delta = lhs.ldlt().solve(-grad);
      const Eigen::VectorXd trial = theta + delta;
      const KillingConstants kc_trial = fit_constants(trial).constants;
      const ResidualStack st_trial = assemble(p, par, geo, trial, kc_trial, shift);
      if (st_trial.objective < st.objective) {
        theta = trial;
        kc = kc_trial;
        st = st_trial;
        damping = std::max(damping / 2.0, 1e-14);
        accepted = true;
        break;
      }
      damping *= 2.0;
    }
    if (!accepted) break;  // no descent direction left at any damping
  }

  res.field = field_of(p, par, theta);
  res.constants = kc;
  if (shift) {
    const double nf = system_residual(res.field, kc).norm;
    const double ng = system_residual(res.field.shifted_zero_mode(*shift), kc).norm;
    res.residual_norm = std::sqrt(nf * nf + ng * ng);
  } else {
    res.residual_norm = system_residual(res.field, kc).norm;
  }
  if (p.is_three_line())
    res.line_energies = line_energies(res.field, std::get<ThreeLineConfig>(p.cfg));
  return res;
}

}  // namespace

DualLattice SearchProblem::dual() const {
  if (is_three_line()) return std::get<ThreeLineConfig>(cfg).dual();
  return std::get<DualLattice>(cfg);
}

FourierField random_initial_field(const SearchProblem& p) {
  const Parametrization par = build_parametrization(p);
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> u(-p.init_scale, p.init_scale);
  Eigen::VectorXd theta(2 * par.params.size());
  for (int i = 0; i < theta.size(); ++i) theta(i) = u(rng);
  return field_of(p, par, theta);
}

SearchResult minimize(const SearchProblem& p) {
  return run_search(p, random_initial_field(p), std::nullopt);
}

SearchResult minimize_from(const SearchProblem& p, const FourierField& init) {
  return run_search(p, init, std::nullopt);
}

ShiftExperimentResult shift_experiment(const SearchProblem& p, double lambda0) {
  return shift_experiment_from(p, lambda0, random_initial_field(p));
}

ShiftExperimentResult shift_experiment_from(const SearchProblem& p, double lambda0,
                                            const FourierField& init) {
  if (lambda0 == 0.0)
    throw validation_error("shift_experiment: lambda0 must be nonzero");
  ShiftExperimentResult out{run_search(p, init, lambda0), 0.0,
                            ShiftClassification::positive_floor};
  out.joint_residual = out.result.residual_norm;

  bool collapsed = false;
  if (out.result.line_energies) {
    std::array<double, 3> e = *out.result.line_energies;
    std::sort(e.begin(), e.end());
    collapsed = e[0] <= 1e-8 && e[1] <= 1e-8;
  } else {
    collapsed = min_off_line_energy(out.result.field) <= 1e-8;
  }
  out.classification = collapsed ? ShiftClassification::one_dimensional
                                 : ShiftClassification::positive_floor;
  return out;
}

std::array<double, 3> line_energies(const FourierField& f, const ThreeLineConfig& cfg) {
  std::array<double, 3> e{0.0, 0.0, 0.0};
  for (const auto& [n, v] : f.coeffs()) {
    if (n.is_origin()) continue;
    const int line = cfg.line_of(n.n1, n.n2);
    if (line >= 0) e[line] += std::norm(v);
  }
  return e;
}

double min_off_line_energy(const FourierField& f) {
  std::vector<Eigen::Vector2d> dirs;
  for (const auto& [n, v] : f.coeffs()) {
    if (n.is_origin()) continue;
    Eigen::Vector2d m = f.node(n).normalized();
    if (m.y() < 0.0 || (m.y() == 0.0 && m.x() < 0.0)) m = -m;
    bool known = false;
    for (const auto& dd : dirs)
      if ((dd - m).norm() < 1e-9) known = true;
    if (!known) dirs.push_back(m);
  }
  if (dirs.empty()) return 0.0;  // constant field
  double best = std::numeric_limits<double>::infinity();
  for (const auto& dir : dirs) {
    double off = 0.0;
    for (const auto& [n, v] : f.coeffs()) {
      if (n.is_origin()) continue;
      const Eigen::Vector2d m = f.node(n);
      if (std::abs(dir.x() * m.y() - dir.y() * m.x()) <= 1e-12 * m.norm()) continue;
      off += std::norm(v);
    }
    best = std::min(best, off);
  }
  return best;
}

}  // namespace ktorus
