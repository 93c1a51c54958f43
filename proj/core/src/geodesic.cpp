#include "ktorus/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ktorus/errors.hpp"

namespace ktorus {

namespace {

struct Derivatives {
  const FourierField* lam;
  const FourierField* lam_x;
  const FourierField* lam_y;

  void accel(const GeodesicState& s, double& ax, double& ay) const {
    const double l = lam->evaluate(s.x, s.y);
    if (!(l > 0.0)) {
      std::ostringstream os;
      os << "integrate_geodesic: lambda = " << l << " at (" << s.x << "," << s.y << ")";
      throw check_failure(os.str());
    }
    const double lx = lam_x->evaluate(s.x, s.y);
    const double ly = lam_y->evaluate(s.x, s.y);
    ax = -(lx * (s.vx * s.vx - s.vy * s.vy) + 2.0 * ly * s.vx * s.vy) / (2.0 * l);
    ay = -(ly * (s.vy * s.vy - s.vx * s.vx) + 2.0 * lx * s.vx * s.vy) / (2.0 * l);
  }
};

struct Rates {
  double dx, dy, dvx, dvy;
};

Rates eval_rates(const Derivatives& d, const GeodesicState& s) {
  Rates r;
  r.dx = s.vx;
  r.dy = s.vy;
  d.accel(s, r.dvx, r.dvy);
  return r;
}

GeodesicState advance(const GeodesicState& s, const Rates& r, double h) {
  return {s.x + h * r.dx, s.y + h * r.dy, s.vx + h * r.dvx, s.vy + h * r.dvy};
}

}  // namespace

Trajectory integrate_geodesic(const FourierField& f, const GeodesicState& init, double T,
                              double h) {
  if (!(h > 0.0)) throw validation_error("integrate_geodesic: h must be positive");
  if (!(T >= h)) throw validation_error("integrate_geodesic: T must be >= h");

  // Positivity scan of the conformal factor over the fundamental domain.
  const Eigen::Matrix2d primal = f.dual().primal_basis();
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      const Eigen::Vector2d p = primal * Eigen::Vector2d(i / 64.0, j / 64.0);
      const double l = f.evaluate(p.x(), p.y());
      if (!(l > 0.0)) {
        std::ostringstream os;
        os << "integrate_geodesic: lambda not positive on the sample grid (lambda = " << l
           << " at (" << p.x() << "," << p.y() << "))";
        throw check_failure(os.str());
      }
    }
  }

  using Op = FourierField::DiffOp;
  const FourierField lam_x = f.diff(Op::dx);
  const FourierField lam_y = f.diff(Op::dy);
  const Derivatives d{&f, &lam_x, &lam_y};

  const long long steps = std::llround(T / h);
  Trajectory traj;
  traj.h = h;
  traj.states.reserve(size_t(steps) + 1);
  traj.states.push_back(init);

  GeodesicState s = init;
  for (long long k = 0; k < steps; ++k) {
    const Rates k1 = eval_rates(d, s);
    const Rates k2 = eval_rates(d, advance(s, k1, h / 2.0));
    const Rates k3 = eval_rates(d, advance(s, k2, h / 2.0));
    const Rates k4 = eval_rates(d, advance(s, k3, h));
    s.x += h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    s.y += h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    s.vx += h / 6.0 * (k1.dvx + 2.0 * k2.dvx + 2.0 * k3.dvx + k4.dvx);
    s.vy += h / 6.0 * (k1.dvy + 2.0 * k2.dvy + 2.0 * k3.dvy + k4.dvy);
    traj.states.push_back(s);
  }
  return traj;
}

std::map<ConservedQuantity, ConservationSeries> conserved_quantities(
    const FourierField& f, const Trajectory& traj,
    const std::vector<ConservedQuantity>& which, bool enforce) {
  const bool wants_clairaut =
      std::find(which.begin(), which.end(), ConservedQuantity::clairaut) != which.end() ||
      std::find(which.begin(), which.end(), ConservedQuantity::clairaut_cube) != which.end();
  if (wants_clairaut && enforce) {
    const SpectrumReport rep = spectrum_analysis(f);
    const bool x_axis = !rep.spectrum.empty() &&
                        (!rep.one_dimensional.has_value()
                             ? rep.spectrum.size() <= 1  // constant field: fine
                             : std::abs(rep.one_dimensional->y()) <= 1e-12);
    if (!(x_axis || rep.spectrum.size() <= 1))
      throw validation_error(
          "conserved_quantities: Clairaut integral requires lambda = mu(x) "
          "(spectrum on the x-axis)");
  }

  std::map<ConservedQuantity, ConservationSeries> out;
  for (const ConservedQuantity q : which) {
    ConservationSeries series;
    series.values.reserve(traj.states.size());
    for (const GeodesicState& s : traj.states) {
      const double lam = f.evaluate(s.x, s.y);
      double v = 0.0;
      switch (q) {
        case ConservedQuantity::energy: v = lam * (s.vx * s.vx + s.vy * s.vy); break;
        case ConservedQuantity::clairaut: v = lam * s.vy; break;
        case ConservedQuantity::clairaut_cube: v = std::pow(lam * s.vy, 3); break;
      }
      series.values.push_back(v);
    }
    const double q0 = series.values.empty() ? 0.0 : series.values.front();
    const double scale = std::abs(q0) > 1e-14 ? std::abs(q0) : 1.0;
    for (const double v : series.values)
      series.max_drift = std::max(series.max_drift, std::abs(v - q0) / scale);
    out[q] = std::move(series);
  }
  return out;
}

Eigen::Vector2d reduce_to_fundamental_domain(const FourierField& f, double x, double y) {
  const Eigen::Matrix2d primal = f.dual().primal_basis();
  Eigen::Vector2d frac = primal.inverse() * Eigen::Vector2d(x, y);
  frac.x() -= std::floor(frac.x());
  frac.y() -= std::floor(frac.y());
  return primal * frac;
}

}  // namespace ktorus
