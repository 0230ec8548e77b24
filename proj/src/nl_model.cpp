#include "kcontract/nl_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kc {

Box::Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw std::invalid_argument("Box: bound lists differ in length");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      std::ostringstream os;
      os << "Box: lower[" << i << "] = " << lower[i] << " exceeds upper[" << i << "] = " << upper[i];
      throw std::invalid_argument(os.str());
    }
  }
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x(i) < lower[i] - tol || x(i) > upper[i] + tol) return false;
  return true;
}

Vector Box::center() const {
  Vector c(dim());
  for (int i = 0; i < dim(); ++i) c(i) = 0.5 * (lower[i] + upper[i]);
  return c;
}

Vector Box::at(const Vector& u) const {
  Vector x(dim());
  for (int i = 0; i < dim(); ++i) x(i) = lower[i] + u(i) * (upper[i] - lower[i]);
  return x;
}

Matrix NonlinearModel::jacobian(const Vector& x) const {
  Matrix j = a0;
  for (const auto& t : terms) j += t.theta(x) * t.a;
  return j;
}

Matrix NonlinearModel::envelope_at(const std::vector<double>& theta) const {
  Matrix j = a0;
  for (std::size_t i = 0; i < terms.size(); ++i) j += theta[i] * terms[i].a;
  return j;
}

NonlinearModel linear_model(const Matrix& a, const std::string& name) {
  require_square(a, "linear_model");
  NonlinearModel m;
  m.name = name;
  m.dim = static_cast<int>(a.rows());
  m.a0 = a;
  m.f = [a](const Vector& x) -> Vector { return a * x; };
  m.bounds = [](const Box&) { return std::vector<Interval>{}; };
  return m;
}

std::vector<Matrix> envelope_vertices(const NonlinearModel& model, const Box& box) {
  if (box.dim() != model.dim) throw std::invalid_argument("envelope_vertices: box dimension mismatch");
  const int m = static_cast<int>(model.terms.size());
  if (m > kMaxEnvelopeTerms) {
    std::ostringstream os;
    os << "envelope_vertices: " << m << " envelope terms exceed the cap of " << kMaxEnvelopeTerms
       << " (2^m vertices); use envelope_grid_samples for a non-certifying check";
    throw std::invalid_argument(os.str());
  }
  const std::vector<Interval> iv = m > 0 ? model.bounds(box) : std::vector<Interval>{};
  if (static_cast<int>(iv.size()) != m) throw std::invalid_argument("envelope_vertices: bounds/term count mismatch");
  const std::size_t count = std::size_t{1} << m;
  std::vector<Matrix> out;
  out.reserve(count);
  std::vector<double> theta(m);
  for (std::size_t v = 0; v < count; ++v) {
    for (int j = 0; j < m; ++j) theta[j] = ((v >> j) & 1u) ? iv[j].hi : iv[j].lo;
    out.push_back(model.envelope_at(theta));
  }
  return out;
}

std::vector<Matrix> envelope_grid_samples(const NonlinearModel& model, const Box& box, int per_axis) {
  if (per_axis < 2) throw std::invalid_argument("envelope_grid_samples: need at least 2 points per axis");
  const int n = model.dim;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<Matrix> out;
  out.reserve(total);
  Vector u(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = 0; i < n; ++i) {
      u(i) = static_cast<double>(r % per_axis) / (per_axis - 1);
      r /= per_axis;
    }
    out.push_back(model.jacobian(box.at(u)));
  }
  return out;
}

Matrix fd_jacobian(const VectorField& f, const Vector& x) {
  const Eigen::Index n = x.size();
  Matrix j(n, n);
  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x(i)));
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return j;
}

}  // namespace kc
