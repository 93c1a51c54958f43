#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ktorus/field.hpp"
#include "ktorus/killing.hpp"
#include "ktorus/lattice.hpp"

namespace ktorus {

/// A residual-minimization problem over coefficient space with a fixed real
/// zero mode.  `eta` weighs the one-dimensionality barrier
/// eta / (eps + product of the two smallest line energies) (three-line
/// configurations) resp. eta / (eps + smallest off-line energy) (general
/// lattices); eta = 0 disables it.  Lattice parameters are user-supplied and
/// never optimized.
struct SearchProblem {
  std::variant<DualLattice, ThreeLineConfig> cfg = DualLattice(0.0, 1.0);
  int band = 2;
  double zero_mode = 1.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  int max_iters = 200;
  double init_scale = 0.1;
  double damping_init = 1e-3;
  double grad_tol = 1e-12;

  bool is_three_line() const { return std::holds_alternative<ThreeLineConfig>(cfg); }
  DualLattice dual() const;
};

struct TraceEntry {
  int iter = 0;
  double objective = 0.0;
  double residual_norm = 0.0;
  double damping = 0.0;
};

struct SearchResult {
  FourierField field;
  KillingConstants constants;
  double residual_norm = 0.0;  // re-verified against system_residual
  std::optional<std::array<double, 3>> line_energies;
  std::vector<TraceEntry> trace;
  bool converged = false;  // gradient norm reached grad_tol
};

/// Deterministic random initial coefficients for the problem's support.
FourierField random_initial_field(const SearchProblem& p);

/// Alternates an exact constants fit with one damped Gauss-Newton step on the
/// coefficients (Levenberg damping, factor 2 up/down) until the gradient norm
/// drops below grad_tol or max_iters is reached.  The objective is
/// non-increasing across accepted iterations; parity and the fixed zero mode
/// hold at every iterate.
SearchResult minimize(const SearchProblem& p);
SearchResult minimize_from(const SearchProblem& p, const FourierField& init);

enum class ShiftClassification { one_dimensional, positive_floor };

struct ShiftExperimentResult {
  SearchResult result;
  double joint_residual = 0.0;  // sqrt(|R(lambda)|^2 + |R(lambda+lambda0)|^2)
  ShiftClassification classification = ShiftClassification::positive_floor;
};

/// Minimizes |R(lambda)|^2 + |R(lambda + lambda0)|^2 with one shared constant
/// vector for both fields.  Results are observational (the underlying
/// questions are open); the classification reports whether the minimizer
/// collapsed onto a single spectral line.
ShiftExperimentResult shift_experiment(const SearchProblem& p, double lambda0);
ShiftExperimentResult shift_experiment_from(const SearchProblem& p, double lambda0,
                                            const FourierField& init);

/// Per-line coefficient energies (sum |coeff|^2 over both index signs) for a
/// field on a three-line configuration.
std::array<double, 3> line_energies(const FourierField& f, const ThreeLineConfig& cfg);

/// Smallest off-line energy over candidate lines through support nodes.
double min_off_line_energy(const FourierField& f);

}  // namespace ktorus
