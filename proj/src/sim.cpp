#include "kcontract/sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "kcontract/compound.hpp"

namespace kc {

namespace {

void check_step(double t_end, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step h must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
}

double point_segment_distance(const Vector& p, const Vector& a, const Vector& b) {
  const Vector ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

}  // namespace

Trace integrate(const VectorField& field, const Vector& x0, double t_end, double h, int record_every) {
  check_step(t_end, h);
  record_every = std::max(1, record_every);
  Trace tr;
  Vector x = x0;
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  const long steps = step_count(t_end, h);
  for (long i = 1; i <= steps; ++i) {
    const double t_prev = (i - 1) * h;
    const double dt = std::min(h, t_end - t_prev);
    x = rk4_step(field, x, dt);
    if (!x.allFinite()) {
      tr.truncated = true;
      break;
    }
    if (i % record_every == 0 || i == steps) {
      tr.times.push_back(i == steps ? t_end : i * h);
      tr.states.push_back(x);
    }
  }
  return tr;
}

Trace integrate_compound(const NonlinearModel& model, const Vector& x0, const Matrix& v0, int k, double t_end,
                         double h, int record_every) {
  check_step(t_end, h);
  const int n = model.dim;
  if (v0.rows() != n || v0.cols() != k) throw std::invalid_argument("integrate_compound: V0 must be n x k");
  const Matrix y0m = multiplicative_compound(v0, k);
  if (y0m.norm() == 0.0) throw std::invalid_argument("integrate_compound: columns of V0 are dependent");
  record_every = std::max(1, record_every);

  // J^[k] is affine in theta because the compound is linear in J.
  const Matrix c0 = additive_compound(model.a0, k);
  std::vector<Matrix> cj;
  for (const auto& t : model.terms) cj.push_back(additive_compound(t.a, k));
  const Eigen::Index nk = c0.rows();

  // Joint state z = (x, y).
  const VectorField joint = [&](const Vector& z) -> Vector {
    const Vector x = z.head(n);
    Matrix c = c0;
    for (std::size_t j = 0; j < cj.size(); ++j) c += model.terms[j].theta(x) * cj[j];
    Vector dz(n + nk);
    dz.head(n) = model.f(x);
    dz.tail(nk) = c * z.tail(nk);
    return dz;
  };
  Vector z(n + nk);
  z.head(n) = x0;
  z.tail(nk) = y0m.col(0);
  const Trace full = integrate(joint, z, t_end, h, record_every);
  Trace tr;
  tr.times = full.times;
  tr.truncated = full.truncated;
  tr.states.reserve(full.size());
  tr.compound_norms.reserve(full.size());
  for (const auto& s : full.states) {
    tr.states.push_back(s.head(n));
    tr.compound_norms.push_back(s.tail(nk).norm());
  }
  return tr;
}

DecayFit fit_decay(const Trace& trace) {
  const std::size_t N = trace.compound_norms.size();
  if (N < 4 || N != trace.times.size()) throw std::invalid_argument("fit_decay: trace has no compound norms");
  for (double v : trace.compound_norms)
    if (!(v > 0.0)) throw std::invalid_argument("fit_decay: non-positive compound norm");
  const std::size_t start = N / 2;
  const double m = static_cast<double>(N - start);
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = start; i < N; ++i) {
    const double t = trace.times[i];
    const double y = std::log(trace.compound_norms[i] / trace.compound_norms[0]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double den = m * stt - st * st;
  const double slope = (m * sty - st * sy) / den;
  const double icpt = (sy - slope * st) / m;
  double ss = 0.0;
  for (std::size_t i = start; i < N; ++i) {
    const double y = std::log(trace.compound_norms[i] / trace.compound_norms[0]);
    const double r = y - (icpt + slope * trace.times[i]);
    ss += r * r;
  }
  DecayFit fit;
  fit.a = -slope;
  fit.b = std::exp(icpt);
  fit.residual = std::sqrt(ss / m);
  return fit;
}

ImmersionGrid parallelotope_grid(const Vector& origin, const Matrix& edges, int resolution) {
  const int k = static_cast<int>(edges.cols());
  if (k < 1 || k > 2) throw std::invalid_argument("parallelotope_grid: only k = 1 or 2 is supported");
  if (resolution < 3) throw std::invalid_argument("parallelotope_grid: resolution must be >= 3");
  if (edges.rows() != origin.size()) throw std::invalid_argument("parallelotope_grid: dimension mismatch");
  ImmersionGrid g;
  g.k = k;
  g.resolution = resolution;
  const double step = 1.0 / (resolution - 1);
  const int nj = (k == 2) ? resolution : 1;
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < resolution; ++i) {
      Vector p = origin + (i * step) * edges.col(0);
      if (k == 2) p += (j * step) * edges.col(1);
      g.points.push_back(p);
    }
  }
  return g;
}

ImmersionGrid flow_immersion(const VectorField& field, const ImmersionGrid& grid, double t, double h) {
  ImmersionGrid out = grid;
  if (t <= 0.0) return out;
  out.points = kernels::omp::flow_points(field, grid.points, t, h);
  return out;
}

VolumeResult volume_of_immersion(const ImmersionGrid& grid, const Matrix& p) {
  const int res = grid.resolution;
  if (res < 3) throw std::invalid_argument("volume_of_immersion: resolution must be >= 3");
  if (grid.k < 1 || grid.k > 2) throw std::invalid_argument("volume_of_immersion: k must be 1 or 2");
  const std::size_t expected = grid.k == 1 ? res : static_cast<std::size_t>(res) * res;
  if (grid.points.size() != expected) throw std::invalid_argument("volume_of_immersion: incomplete grid");
  const Matrix ps = symmetrize(p);
  if (inertia_symmetric(ps).pos != ps.rows()) throw std::invalid_argument("volume_of_immersion: P must be positive definite");
  const double dr = 1.0 / (res - 1);
  VolumeResult out;
  if (grid.k == 1) {
    for (int i = 0; i + 1 < res; ++i) {
      const Vector d = (grid.at(i + 1) - grid.at(i)) / dr;
      out.volume += std::sqrt(std::max(0.0, d.dot(ps * d))) * dr;
    }
    return out;
  }
  const Eigen::Index n = grid.points.front().size();
  Matrix d(n, 2);
  for (int j = 0; j + 1 < res; ++j) {
    for (int i = 0; i + 1 < res; ++i) {
      d.col(0) = ((grid.at(i + 1, j) + grid.at(i + 1, j + 1)) - (grid.at(i, j) + grid.at(i, j + 1))) / (2.0 * dr);
      d.col(1) = ((grid.at(i, j + 1) + grid.at(i + 1, j + 1)) - (grid.at(i, j) + grid.at(i + 1, j))) / (2.0 * dr);
      const Matrix g = d.transpose() * ps * d;
      double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
      if (det < 0.0) {
        out.degenerate = true;
        det = 0.0;
      }
      out.volume += std::sqrt(det) * dr * dr;
    }
  }
  return out;
}

std::string to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::stable: return "stable";
    case EquilibriumKind::saddle: return "saddle";
    case EquilibriumKind::repelling: return "repelling";
    case EquilibriumKind::nonhyperbolic: return "nonhyperbolic";
  }
  return "unknown";
}

std::string to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::fixed_point: return "fixed_point";
    case AttractorKind::limit_cycle: return "limit_cycle";
    case AttractorKind::unresolved: return "unresolved";
  }
  return "unknown";
}

std::vector<Equilibrium> find_equilibria(const VectorField& field, const Box& box, int seeds) {
  const int n = box.dim();
  seeds = std::max(1, seeds);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(seeds);
  std::vector<Vector> roots;
  Vector u(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = 0; i < n; ++i) {
      u(i) = seeds == 1 ? 0.5 : static_cast<double>(r % seeds) / (seeds - 1);
      r /= seeds;
    }
    Vector x = box.at(u);
    Vector fx = field(x);
    bool ok = false;
    for (int it = 0; it < 100 && fx.allFinite(); ++it) {
      if (fx.norm() < 1e-12) {
        ok = true;
        break;
      }
      const Matrix j = fd_jacobian(field, x);
      Eigen::FullPivLU<Matrix> lu(j);
      if (!lu.isInvertible()) break;
      const Vector dx = lu.solve(fx);
      double step = 1.0;
      Vector xn = x - dx;
      Vector fn = field(xn);
      while (!(fn.allFinite() && fn.norm() < fx.norm()) && step > 1e-6) {
        step *= 0.5;
        xn = x - step * dx;
        fn = field(xn);
      }
      if (step <= 1e-6) break;
      x = xn;
      fx = fn;
    }
    if (!ok && !(fx.allFinite() && fx.norm() < 1e-9)) continue;
    bool dup = false;
    for (const auto& r0 : roots) dup = dup || (r0 - x).norm() < 1e-6;
    if (!dup) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end(), [](const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a(i) != b(i)) return a(i) < b(i);
    return false;
  });

  std::vector<Equilibrium> out;
  for (const auto& x : roots) {
    Equilibrium e;
    e.point = x;
    e.spectrum = eigenvalues(fd_jacobian(field, x));
    double scale = 1.0;
    for (const auto& l : e.spectrum.values) scale = std::max(scale, std::abs(l));
    int pos = 0, neg = 0, zero = 0;
    for (const auto& l : e.spectrum.values) {
      if (std::abs(l.real()) <= 1e-7 * scale) {
        ++zero;
      } else if (l.real() > 0) {
        ++pos;
      } else {
        ++neg;
      }
    }
    if (zero > 0) {
      e.kind = EquilibriumKind::nonhyperbolic;
    } else if (pos == 0) {
      e.kind = EquilibriumKind::stable;
    } else if (neg == 0) {
      e.kind = EquilibriumKind::repelling;
    } else {
      e.kind = EquilibriumKind::saddle;
    }
    out.push_back(e);
  }
  return out;
}

AttractorClass classify_attractor(const Trace& trace, double tol) {
  AttractorClass out;
  const std::size_t N = trace.size();
  if (N < 4 || trace.truncated) return out;
  const std::size_t start = N / 2;
  const Vector& xe = trace.states[N - 1];
  const double dt = trace.times[N - 1] - trace.times[N - 2];
  out.terminal_speed = (trace.states[N - 1] - trace.states[N - 2]).norm() / dt;

  double disp = 0.0;
  for (std::size_t i = start; i < N; ++i) disp = std::max(disp, (trace.states[i] - xe).norm());
  if (out.terminal_speed < tol && disp < tol) {
    out.kind = AttractorKind::fixed_point;
    out.recurrence = disp;
    return out;
  }

  // Walk back from the end: leave the tol-neighbourhood, then look for the
  // closest return to the final state.
  std::size_t i = N - 1;
  while (i > start && (trace.states[i] - xe).norm() <= 10.0 * tol) --i;
  out.recurrence = std::numeric_limits<double>::infinity();
  for (; i > start; --i) {
    const double dist = point_segment_distance(xe, trace.states[i - 1], trace.states[i]);
    if (dist < out.recurrence) {
      out.recurrence = dist;
      out.period = trace.times[N - 1] - trace.times[i];
    }
    if (dist <= tol) break;
  }
  if (out.recurrence <= tol && out.terminal_speed >= tol) out.kind = AttractorKind::limit_cycle;
  return out;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  const std::size_t N = trace.size();
  const Eigen::Index n = N > 0 ? trace.states.front().size() : 0;
  const bool with_norm = trace.compound_norms.size() == N && N > 0;
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  if (with_norm) os << ",compound_norm";
  os << "\n";
  const auto old = os.precision(12);
  for (std::size_t r = 0; r < N; ++r) {
    os << trace.times[r];
    for (Eigen::Index i = 0; i < n; ++i) os << "," << trace.states[r](i);
    if (with_norm) os << "," << trace.compound_norms[r];
    os << "\n";
  }
  os.precision(old);
}

}  // namespace kc
