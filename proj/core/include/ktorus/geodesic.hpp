#pragma once

#include <map>
#include <string>
#include <vector>

#include "ktorus/field.hpp"

namespace ktorus {

struct GeodesicState {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
};

struct Trajectory {
  double h = 0.0;
  std::vector<GeodesicState> states;  // states[k] at time k*h, unreduced coordinates
  double time(size_t k) const { return h * double(k); }
};

/// Fixed-step classical RK4 for the geodesic equations of the conformal
/// metric lambda (dx^2 + dy^2):
///   x'' = -(lambda_x (vx^2 - vy^2) + 2 lambda_y vx vy) / (2 lambda)
///   y'' = -(lambda_y (vy^2 - vx^2) + 2 lambda_x vx vy) / (2 lambda)
/// Requires lambda > 0 on a 64x64 sample grid, h > 0, T >= h.
Trajectory integrate_geodesic(const FourierField& f, const GeodesicState& init, double T,
                              double h);

enum class ConservedQuantity { energy, clairaut, clairaut_cube };

struct ConservationSeries {
  std::vector<double> values;
  double max_drift = 0.0;  // max |Q(t) - Q(0)| / |Q(0)| (absolute if Q(0) ~ 0)
};

/// energy = lambda (vx^2 + vy^2); clairaut = lambda*vy (valid when the
/// spectrum lies on the x-axis, i.e. lambda = mu(x)); clairaut_cube = (lambda*vy)^3.
/// With enforce set, requesting a Clairaut quantity for a field that is not
/// one-dimensional along the x-axis throws.
std::map<ConservedQuantity, ConservationSeries> conserved_quantities(
    const FourierField& f, const Trajectory& traj,
    const std::vector<ConservedQuantity>& which, bool enforce = true);

/// Position folded into the primal fundamental domain (reporting only).
Eigen::Vector2d reduce_to_fundamental_domain(const FourierField& f, double x, double y);

}  // namespace ktorus
