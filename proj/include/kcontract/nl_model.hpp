#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kcontract/kernels.hpp"
#include "kcontract/numkernel.hpp"

namespace kc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Axis-aligned box lower <= x <= upper.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x, double tol = 0.0) const;
  Vector center() const;
  /// Maps u in [0,1]^n to the box.
  Vector at(const Vector& u) const;
};

/// J(x) = A0 + sum_j theta_j(x) A_j.
struct EnvelopeTerm {
  Matrix a;
  std::function<double(const Vector&)> theta;
  std::string label;
};

struct NonlinearModel {
  std::string name;
  int dim = 0;
  VectorField f;
  Matrix a0;
  std::vector<EnvelopeTerm> terms;
  /// Interval bounds of every theta_j over a box.
  std::function<std::vector<Interval>(const Box&)> bounds;
  /// Optional input matrix (n x m) for synthesis commands; empty if absent.
  Matrix b;

  Matrix jacobian(const Vector& x) const;
  /// A0 + sum theta_j A_j for given theta values.
  Matrix envelope_at(const std::vector<double>& theta) const;
};

/// ẋ = A x as a model with no envelope terms.
NonlinearModel linear_model(const Matrix& a, const std::string& name = "linear");

inline constexpr int kMaxEnvelopeTerms = 16;

/// All 2^m matrices A0 + sum theta_j^{+-} A_j. Bit j of the vertex index
/// selects the upper (1) or lower (0) bound of theta_j. Throws
/// std::invalid_argument when m > 16.
std::vector<Matrix> envelope_vertices(const NonlinearModel& model, const Box& box);

/// Non-certifying fallback: the Jacobian on a uniform grid of the box with
/// `per_axis` points per coordinate.
std::vector<Matrix> envelope_grid_samples(const NonlinearModel& model, const Box& box, int per_axis);

/// Central finite-difference Jacobian.
Matrix fd_jacobian(const VectorField& f, const Vector& x);

}  // namespace kc
