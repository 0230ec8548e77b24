#pragma once

#include <functional>
#include <vector>

#include "kcontract/numkernel.hpp"

namespace kc {

using VectorField = std::function<Vector(const Vector&)>;

/// One classical RK4 step.
inline Vector rk4_step(const VectorField& f, const Vector& x, double h) {
  const Vector k1 = f(x);
  const Vector k2 = f(x + 0.5 * h * k1);
  const Vector k3 = f(x + 0.5 * h * k2);
  const Vector k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of RK4 steps used to reach t_end with nominal step h; the last
/// step is shortened so the trace ends exactly at t_end.
inline long step_count(double t_end, double h) {
  const double s = t_end / h;
  const long n = static_cast<long>(s);
  return (s - static_cast<double>(n) > 1e-9 * s) ? n + 1 : n;
}

// Data-parallel hot loops. `serial` is the reference; `omp` must agree with
// it bit-for-bit on every output slot.
namespace kernels {

namespace serial {
Matrix multiplicative_compound(const Matrix& q, int k);
/// lambda_max(J_v^T P + P J_v - 2 mu P) for every vertex.
std::vector<double> vertex_margins(const std::vector<Matrix>& vertices, const Matrix& p, double mu);
/// RK4 flow of every point to time t (non-finite states are left as NaN).
std::vector<Vector> flow_points(const VectorField& f, const std::vector<Vector>& x0, double t, double h);
}  // namespace serial

namespace omp {
Matrix multiplicative_compound(const Matrix& q, int k);
std::vector<double> vertex_margins(const std::vector<Matrix>& vertices, const Matrix& p, double mu);
std::vector<Vector> flow_points(const VectorField& f, const std::vector<Vector>& x0, double t, double h);
}  // namespace omp

}  // namespace kernels
}  // namespace kc
