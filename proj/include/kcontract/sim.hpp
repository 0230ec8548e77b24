#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kcontract/kernels.hpp"
#include "kcontract/nl_model.hpp"

namespace kc {

struct Trace {
  std::vector<double> times;
  std::vector<Vector> states;
  /// |X^(k)(t)|, only filled by integrate_compound.
  std::vector<double> compound_norms;
  /// Set when integration stopped on a non-finite state.
  bool truncated = false;

  std::size_t size() const { return times.size(); }
};

/// Fixed-step RK4 from t = 0 to t_end. Every `record_every`-th step is stored
/// (plus the initial and final state).
Trace integrate(const VectorField& field, const Vector& x0, double t_end, double h = 1e-3, int record_every = 1);

/// Co-integrates x and y = X^(k) with ẏ = J(x)^[k] y, y(0) = V0^(k).
Trace integrate_compound(const NonlinearModel& model, const Vector& x0, const Matrix& v0, int k, double t_end,
                         double h = 1e-3, int record_every = 1);

struct DecayFit {
  double a = 0.0;  // rate
  double b = 0.0;  // overshoot
  double residual = 0.0;
};

/// Least-squares line through log|y| over the trailing half of the trace.
DecayFit fit_decay(const Trace& trace);

/// Immersion of [0,1]^k (k = 1 or 2) sampled on a uniform grid with nodes
/// i / (resolution - 1); points are stored with the first parameter fastest.
struct ImmersionGrid {
  int k = 1;
  int resolution = 0;
  std::vector<Vector> points;

  const Vector& at(int i, int j = 0) const { return points[static_cast<std::size_t>(j) * resolution + i]; }
};

/// Grid of origin + r_1 e_1 + ... + r_k e_k, edges given as columns.
ImmersionGrid parallelotope_grid(const Vector& origin, const Matrix& edges, int resolution);

/// Pushes every grid point through the flow for time t (same h everywhere).
ImmersionGrid flow_immersion(const VectorField& field, const ImmersionGrid& grid, double t, double h = 1e-3);

struct VolumeResult {
  double volume = 0.0;
  /// Some cell had det(D^T P D) < 0 from roundoff and was clamped to 0.
  bool degenerate = false;
};

/// Midpoint rule for the integral of sqrt(det(D^T P D)), D = dPhi/dr, with
/// difference quotients at cell centres.
VolumeResult volume_of_immersion(const ImmersionGrid& grid, const Matrix& p);

enum class EquilibriumKind { stable, saddle, repelling, nonhyperbolic };
std::string to_string(EquilibriumKind k);

struct Equilibrium {
  Vector point;
  EquilibriumKind kind = EquilibriumKind::nonhyperbolic;
  Spectrum spectrum;
};

/// Damped Newton from a lattice of `seeds` points per axis in the box,
/// finite-difference Jacobians, duplicates within 1e-6 merged.
std::vector<Equilibrium> find_equilibria(const VectorField& field, const Box& box, int seeds);

enum class AttractorKind { fixed_point, limit_cycle, unresolved };
std::string to_string(AttractorKind k);

struct AttractorClass {
  AttractorKind kind = AttractorKind::unresolved;
  double terminal_speed = 0.0;
  /// Closest return to the final state within the trailing window.
  double recurrence = 0.0;
  double period = 0.0;
};

/// Looks only at the trailing half of the trace.
AttractorClass classify_attractor(const Trace& trace, double tol = 1e-3);

/// CSV with header t,x1..xn[,compound_norm], 12 significant digits.
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace kc
