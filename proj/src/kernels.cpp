#include "kcontract/kernels.hpp"

#include <cmath>
#include <limits>

#include "kcontract/compound.hpp"

namespace kc::kernels {

namespace {

double vertex_margin(const Matrix& j, const Matrix& p, double mu) {
  const Matrix s = j.transpose() * p + p * j - 2.0 * mu * p;
  return max_eig_sym(symmetrize(s));
}

Vector flow_one(const VectorField& f, const Vector& x0, double t, double h) {
  Vector x = x0;
  const long steps = step_count(t, h);
  double now = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double dt = std::min(h, t - now);
    x = rk4_step(f, x, dt);
    now += dt;
    if (!x.allFinite()) {
      x.setConstant(std::numeric_limits<double>::quiet_NaN());
      break;
    }
  }
  return x;
}

}  // namespace

namespace serial {

Matrix multiplicative_compound(const Matrix& q, int k) {
  const IndexSubsets rows = index_subsets(static_cast<int>(q.rows()), k);
  const IndexSubsets cols = index_subsets(static_cast<int>(q.cols()), k);
  Matrix out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      out(a, b) = minor_det(q, rows.subsets[a], cols.subsets[b]);
  return out;
}

std::vector<double> vertex_margins(const std::vector<Matrix>& vertices, const Matrix& p, double mu) {
  std::vector<double> out(vertices.size());
  for (std::size_t v = 0; v < vertices.size(); ++v) out[v] = vertex_margin(vertices[v], p, mu);
  return out;
}

std::vector<Vector> flow_points(const VectorField& f, const std::vector<Vector>& x0, double t, double h) {
  std::vector<Vector> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out[i] = flow_one(f, x0[i], t, h);
  return out;
}

}  // namespace serial

namespace omp {

Matrix multiplicative_compound(const Matrix& q, int k) {
  const IndexSubsets rows = index_subsets(static_cast<int>(q.rows()), k);
  const IndexSubsets cols = index_subsets(static_cast<int>(q.cols()), k);
  const long nr = static_cast<long>(rows.size());
  const long nc = static_cast<long>(cols.size());
  Matrix out(nr, nc);
#pragma omp parallel for collapse(2) schedule(static)
  for (long a = 0; a < nr; ++a)
    for (long b = 0; b < nc; ++b) out(a, b) = minor_det(q, rows.subsets[a], cols.subsets[b]);
  return out;
}

std::vector<double> vertex_margins(const std::vector<Matrix>& vertices, const Matrix& p, double mu) {
  const long nv = static_cast<long>(vertices.size());
  std::vector<double> out(nv);
#pragma omp parallel for schedule(dynamic, 4)
  for (long v = 0; v < nv; ++v) out[v] = vertex_margin(vertices[v], p, mu);
  return out;
}

std::vector<Vector> flow_points(const VectorField& f, const std::vector<Vector>& x0, double t, double h) {
  const long np = static_cast<long>(x0.size());
  std::vector<Vector> out(np);
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < np; ++i) out[i] = flow_one(f, x0[i], t, h);
  return out;
}

}  // namespace omp

}  // namespace kc::kernels
