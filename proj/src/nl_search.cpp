#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "kcontract/lin_contraction.hpp"
#include "kcontract/nl_verify.hpp"

namespace kc {

namespace {

// Symmetric n x n matrices as vectors of their upper triangle.
struct SymCoords {
  int n = 0;
  std::vector<std::pair<int, int>> idx;

  explicit SymCoords(int dim) : n(dim) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) idx.emplace_back(i, j);
  }
  int size() const { return static_cast<int>(idx.size()); }

  Matrix mat(const Vector& p) const {
    Matrix m(n, n);
    for (int t = 0; t < size(); ++t) {
      m(idx[t].first, idx[t].second) = p(t);
      m(idx[t].second, idx[t].first) = p(t);
    }
    return m;
  }
  Vector vec(const Matrix& m) const {
    Vector p(size());
    for (int t = 0; t < size(); ++t) p(t) = m(idx[t].first, idx[t].second);
    return p;
  }
  // Gradient of <G, P> with respect to the coordinates.
  Vector grad(const Matrix& g) const {
    Vector v(size());
    for (int t = 0; t < size(); ++t) {
      const auto [i, j] = idx[t];
      v(t) = (i == j) ? g(i, i) : 2.0 * g(i, j);
    }
    return v;
  }
};

struct Feasible {
  bool found = false;
  Matrix p;
  double margin = std::numeric_limits<double>::infinity();
};

// Looks for P with ||P|| <= 1, lambda_max(J_v^T P + P J_v - 2 mu P) < 0 at
// every vertex and inertia `want`. Deep-cut ellipsoid method on
// max_v lambda_max(...), which is convex in P.
Feasible ellipsoid_feasible(const std::vector<Matrix>& verts, double mu, const InertiaTriple& want, int iterations) {
  const int n = static_cast<int>(verts.front().rows());
  Feasible out;
  if (n == 1) {
    for (double s : {1.0, -1.0}) {
      Matrix p = Matrix::Constant(1, 1, s);
      const VertexMargin w = worst_vertex_margin(verts, p, mu);
      if (w.margin < 0.0 && inertia_symmetric(p) == want) return {true, p, w.margin};
    }
    return out;
  }
  const SymCoords sc(n);
  const int d = sc.size();
  const double dd = static_cast<double>(d);
  Vector c = Vector::Zero(d);
  Matrix e = Matrix::Identity(d, d) * (1.05 * n);

  for (int it = 0; it < iterations; ++it) {
    const Matrix p = sc.mat(c);
    Eigen::SelfAdjointEigenSolver<Matrix> es(p);
    const auto& ev = es.eigenvalues();
    Vector g;
    double value = 0.0;
    if (ev(n - 1) > 1.0) {
      const Vector u = es.eigenvectors().col(n - 1);
      g = sc.grad(u * u.transpose());
      value = ev(n - 1) - 1.0;
    } else if (ev(0) < -1.0) {
      const Vector u = es.eigenvectors().col(0);
      g = -sc.grad(u * u.transpose());
      value = -1.0 - ev(0);
    } else {
      double worst = -std::numeric_limits<double>::infinity();
      std::size_t wv = 0;
      Vector wu;
      for (std::size_t v = 0; v < verts.size(); ++v) {
        const Matrix s = symmetrize(verts[v].transpose() * p + p * verts[v] - 2.0 * mu * p);
        Eigen::SelfAdjointEigenSolver<Matrix> ls(s);
        if (ls.eigenvalues()(n - 1) > worst) {
          worst = ls.eigenvalues()(n - 1);
          wv = v;
          wu = ls.eigenvectors().col(n - 1);
        }
      }
      if (worst < 0.0 && inertia_symmetric(p) == want) return {true, p, worst};
      const Matrix& j = verts[wv];
      const Matrix uu = wu * wu.transpose();
      g = sc.grad(j * uu + uu * j.transpose() - 2.0 * mu * uu);
      value = std::max(worst, 0.0);
    }
    const Vector eg = e * g;
    const double geg = g.dot(eg);
    if (!(geg > 1e-300) || !std::isfinite(geg)) break;
    const double root = std::sqrt(geg);
    const double alpha = value / root;
    if (alpha >= 1.0) break;  // the ellipsoid no longer meets the feasible set
    const Vector gt = eg / root;
    c -= ((1.0 + dd * alpha) / (dd + 1.0)) * gt;
    const double shrink = dd * dd * (1.0 - alpha * alpha) / (dd * dd - 1.0);
    e = shrink * (e - (2.0 * (1.0 + dd * alpha) / ((dd + 1.0) * (1.0 + alpha))) * gt * gt.transpose());
    e = symmetrize(e);
  }
  return out;
}

std::vector<double> sorted_real_parts(const Matrix& j) { return eigenvalues(j).real_parts(); }

// Direct construction for models without envelope terms.
bool linear_attempt(const NonlinearModel& model, const Box& box, int k, SearchResult& res) {
  const Spectrum spec = eigenvalues(model.a0);
  const int n = model.dim;
  const double gap0 = (n > 1) ? spec[0].real() - spec[n - 1].real() : 1.0;
  double eps = std::max(1e-3, 0.25 * std::abs(gap0));
  for (int attempt = 0; attempt < 40; ++attempt, eps /= 2.0) {
    try {
      NonlinearCertificate cert;
      cert.k = k;
      cert.mu0 = spec[0].real() + eps;
      cert.mu1 = spec[k - 1].real() + eps;
      cert.p0 = shifted_inertia_certificate(model.a0, cert.mu0);
      cert.p1 = shifted_inertia_certificate(model.a0, cert.mu1);
      const VerificationReport rep = verify_nl_certificate(model, box, cert, 0.0);
      if (rep.accept) {
        res.success = true;
        res.cert = cert;
        res.report = rep;
        res.message = "direct construction from the spectrum";
        return true;
      }
    } catch (const NumericError&) {
    }
  }
  return false;
}

}  // namespace

SearchResult search_nl_certificate(const NonlinearModel& model, const Box& box, int k, const SearchBudget& budget) {
  const int n = model.dim;
  if (k < 1 || k > n) throw std::invalid_argument("search_nl_certificate: k out of range");
  SearchResult res;
  if (model.terms.empty() && linear_attempt(model, box, k, res)) return res;

  const std::vector<Matrix> verts = envelope_vertices(model, box);
  double lo0 = -std::numeric_limits<double>::infinity();
  double hi0 = -std::numeric_limits<double>::infinity();
  double lo1 = -std::numeric_limits<double>::infinity();
  double cap1 = std::numeric_limits<double>::infinity();
  for (const auto& j : verts) {
    const auto re = sorted_real_parts(j);
    lo0 = std::max(lo0, re[0]);
    hi0 = std::max(hi0, max_eig_sym(symmetrize(j)));
    lo1 = std::max(lo1, re[k - 1]);
    if (k >= 2) cap1 = std::min(cap1, re[k - 2]);
  }
  hi0 += 1.0;
  const InertiaTriple want0{0, 0, n};
  const InertiaTriple want1{k - 1, 0, n - k + 1};

  // Smallest feasible mu0 by bisection; P0 = I works at hi0.
  Feasible best0;
  best0.found = true;
  best0.p = Matrix::Identity(n, n);
  double mu0 = hi0;
  double a = lo0;
  double b = hi0;
  for (int step = 0; step < 14; ++step) {
    const double mid = 0.5 * (a + b);
    const Feasible f = ellipsoid_feasible(verts, mid, want0, budget.iterations);
    if (f.found) {
      b = mid;
      mu0 = mid;
      best0 = f;
    } else {
      a = mid;
    }
    if (b - a < 1e-4 * (1.0 + std::abs(b))) break;
  }

  double hi1 = std::min(cap1, -(k - 1) * mu0);
  std::ostringstream msg;
  msg << "mu0 = " << mu0 << " (bisection); mu1 window (" << lo1 << ", " << hi1 << ")";
  if (!(lo1 < hi1)) {
    res.message = msg.str() + " is empty; no constant pair exists with these rates";
    return res;
  }

  std::vector<double> fracs = {0.5, 0.25, 0.75, 0.1, 0.9, 0.05, 0.95};
  std::mt19937_64 rng(budget.seed);
  std::uniform_real_distribution<double> unif(0.02, 0.98);
  while (static_cast<int>(fracs.size()) < budget.restarts) fracs.push_back(unif(rng));
  fracs.resize(std::max(1, budget.restarts));

  for (double fr : fracs) {
    const double mu1 = lo1 + fr * (hi1 - lo1);
    const Feasible f1 = ellipsoid_feasible(verts, mu1, want1, budget.iterations);
    if (!f1.found) continue;
    NonlinearCertificate cert;
    cert.k = k;
    cert.p0 = best0.p;
    cert.p1 = f1.p;
    cert.mu0 = mu0;
    cert.mu1 = mu1;
    const VerificationReport rep = verify_nl_certificate(model, box, cert, 0.0);
    if (rep.accept) {
      res.success = true;
      res.cert = cert;
      res.report = rep;
      msg << "; accepted at mu1 = " << mu1;
      res.message = msg.str();
      return res;
    }
  }
  res.message = msg.str() + "; no feasible P1 found within budget";
  return res;
}

}  // namespace kc
