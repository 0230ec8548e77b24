#include "kcontract/lin_synthesis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

namespace kc {

namespace {

void check_pair(const Matrix& a, const Matrix& b) {
  require_square(a, "A");
  require_finite(a, "A");
  require_finite(b, "B");
  if (b.rows() != a.rows()) throw std::invalid_argument("B must have as many rows as A");
}

Matrix blockdiag(const Matrix& x, const Matrix& y) {
  Matrix out = Matrix::Zero(x.rows() + y.rows(), x.cols() + y.cols());
  out.topLeftCorner(x.rows(), x.cols()) = x;
  out.bottomRightCorner(y.rows(), y.cols()) = y;
  return out;
}

// Shifted controllability Gramian: W (-g I - Ac + mu I)^T + (...) W = -Bc Bc^T.
Matrix shifted_gramian(const KalmanDecomposition& kd, double mu) {
  if (kd.nc == 0) return Matrix(0, 0);
  const Matrix ac = kd.Ac - mu * Matrix::Identity(kd.nc, kd.nc);
  double min_re = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues(ac).values) min_re = std::min(min_re, l.real());
  const double gamma = std::max(1.0, 1.0 - min_re);
  const Matrix m = -gamma * Matrix::Identity(kd.nc, kd.nc) - ac;
  return solve_lyapunov(m.transpose(), symmetrize(kd.Bc * kd.Bc.transpose()));
}

double w_margin(const Matrix& a, const Matrix& b, const Matrix& w, double mu) {
  const Matrix s = w * a.transpose() + a * w - b * b.transpose() - 2.0 * mu * w;
  return max_eig_sym(symmetrize(s));
}

// Assembles blockdiag(wc, kappa Wu) in staircase coordinates, halving kappa
// until the inequality holds, then maps back to x coordinates.
Matrix assemble_W(const Matrix& a, const Matrix& b, double mu, const KalmanDecomposition& kd,
                  const Matrix& wc) {
  const int n = kd.nc + kd.nu;
  for (const auto& l : eigenvalues(kd.Au).values) {
    if (std::abs(l.real() - mu) <= 1e-9 * (1.0 + std::abs(mu))) {
      std::ostringstream os;
      os << "construct_W: mu = " << mu << " lies on the real part of eigenvalue " << l << " of Au";
      throw NumericError(os.str());
    }
  }
  Matrix wu(0, 0);
  if (kd.nu > 0) {
    const Matrix au = kd.Au - mu * Matrix::Identity(kd.nu, kd.nu);
    wu = solve_lyapunov(au.transpose(), Matrix::Identity(kd.nu, kd.nu));
  }
  double kappa = 1.0;
  double last = 0.0;
  for (int i = 0; i <= 60; ++i, kappa /= 2.0) {
    const Matrix wz = blockdiag(wc, kappa * wu);
    const Matrix w = symmetrize(kd.T.transpose() * wz * kd.T);
    last = w_margin(a, b, w, mu);
    if (last < 0.0 && w.rows() == n) return w;
  }
  std::ostringstream os;
  os << "construct_W: inequality still violated after 60 kappa halvings (margin " << last << ")";
  throw NumericError(os.str());
}

}  // namespace

KalmanDecomposition kalman_decompose(const Matrix& a, const Matrix& b) {
  check_pair(a, b);
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  KalmanDecomposition kd;
  int rank = 0;
  Matrix u = Matrix::Identity(n, n);
  if (n > 0 && m > 0) {
    // Scale both A and B so the Krylov blocks stay O(1).
    const double an = a.norm();
    const double bn = b.norm();
    const Matrix as = an > 0 ? Matrix(a / an) : a;
    const Matrix bs = bn > 0 ? Matrix(b / bn) : b;
    Matrix krylov(n, n * m);
    Matrix blk = bs;
    for (Eigen::Index i = 0; i < n; ++i) {
      krylov.middleCols(i * m, m) = blk;
      blk = as * blk;
    }
    Eigen::JacobiSVD<Matrix> svd(krylov, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (smax > 0.0) {
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * smax) ++rank;
    }
    u = svd.matrixU();
  }
  kd.nc = rank;
  kd.nu = static_cast<int>(n) - rank;
  kd.T = u.transpose();
  const Matrix at = kd.T * a * kd.T.transpose();
  const Matrix bt = kd.T * b;
  kd.Ac = at.topLeftCorner(kd.nc, kd.nc);
  kd.A12 = at.topRightCorner(kd.nc, kd.nu);
  kd.Au = at.bottomRightCorner(kd.nu, kd.nu);
  kd.Bc = bt.topRows(kd.nc);
  return kd;
}

StabilizabilityTest k_order_stabilizable(const Matrix& a, const Matrix& b, int k) {
  check_pair(a, b);
  if (k < 1 || k > a.rows()) throw std::invalid_argument("k_order_stabilizable: k out of range");
  const KalmanDecomposition kd = kalman_decompose(a, b);
  StabilizabilityTest t;
  t.nu = kd.nu;
  std::ostringstream os;
  if (kd.nu < k) {
    t.holds = true;
    t.margin = -std::numeric_limits<double>::infinity();
    os << "n_u = " << kd.nu << " < k = " << k;
  } else {
    t.margin = eigen_sum_max(kd.Au, k);
    t.holds = t.margin < 0.0;
    os << "n_u = " << kd.nu << " >= k; sum of the " << k << " largest real parts of Au = " << t.margin;
  }
  t.diagnostics = os.str();
  return t;
}

Matrix construct_W(const Matrix& a, const Matrix& b, double mu, const KalmanDecomposition& kd) {
  check_pair(a, b);
  return assemble_W(a, b, mu, kd, shifted_gramian(kd, mu));
}

StabilizabilityCertificate stabilizability_certificate(const Matrix& a, const Matrix& b, int k) {
  const StabilizabilityTest test = k_order_stabilizable(a, b, k);
  if (!test.holds) {
    throw ConditionViolation("stabilizability_certificate: not k-order stabilizable (" + test.diagnostics + ")");
  }
  const KalmanDecomposition kd = kalman_decompose(a, b);
  StabilizabilityCertificate cert;
  if (kd.nu == 0) {
    cert.ell = 1;
    cert.ds = {0, 1};
    cert.mus = {-1.0};
  } else if (kd.nu < k) {
    double max_re = -std::numeric_limits<double>::infinity();
    double min_re = std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues(kd.Au).values) {
      max_re = std::max(max_re, l.real());
      min_re = std::min(min_re, l.real());
    }
    const double mu0 = max_re + 1.0;
    const double mu1 = std::min(-kd.nu * mu0 - 1.0, min_re - 1.0);
    cert.ell = 2;
    cert.ds = {0, kd.nu, kd.nu + 1};
    cert.mus = {mu0, mu1};
  } else {
    // Rates and indices come from the uncontrollable block alone.
    const ContractionCertificate lin = build_certificate(kd.Au, k);
    cert.ell = lin.ell;
    cert.ds = lin.ds;
    cert.mus = lin.mus;
  }

  // One Gramian block shared by every W_i keeps B^T W_i^{-1} identical.
  double mu_min = std::numeric_limits<double>::infinity();
  for (double mu : cert.mus) mu_min = std::min(mu_min, mu);
  const Matrix wc = shifted_gramian(kd, mu_min);
  for (double mu : cert.mus) cert.mats.push_back(assemble_W(a, b, mu, kd, wc));
  cert.colinear = true;

  const VerificationReport rep = verify_stabilizability_certificate(a, b, k, cert, 0.0);
  if (!rep.accept) {
    throw NumericError("stabilizability_certificate: constructed certificate failed its check: " + rep.diagnostics);
  }
  return cert;
}

VerificationReport verify_stabilizability_certificate(const Matrix& a, const Matrix& b, int k,
                                                      const StabilizabilityCertificate& cert,
                                                      double slack) {
  check_pair(a, b);
  const int n = static_cast<int>(a.rows());
  const int ell = cert.ell;
  if (ell < 1 || static_cast<int>(cert.mus.size()) != ell || static_cast<int>(cert.mats.size()) != ell ||
      static_cast<int>(cert.ds.size()) != ell + 1) {
    throw std::invalid_argument("verify_stabilizability_certificate: certificate lists do not match ell");
  }
  VerificationReport rep;
  std::ostringstream diag;
  bool ordered = cert.ds[0] == 0;
  for (int i = 0; i < ell; ++i) ordered = ordered && cert.ds[i] < cert.ds[i + 1];
  ordered = ordered && cert.ds[ell - 1] <= k - 1 && cert.ds[ell] <= k;
  rep.add({"index structure d_0 = 0 < ... < d_ell <= k", 0.0, 0.0, ordered, ""});
  if (!ordered) diag << "index list violates ordering; ";

  Matrix g0;
  for (int i = 0; i < ell; ++i) {
    if (cert.mats[i].rows() != n || cert.mats[i].cols() != n)
      throw std::invalid_argument("verify_stabilizability_certificate: dimension mismatch");
    const Matrix w = symmetrize(cert.mats[i]);
    const std::string tag = "W" + std::to_string(i);
    const InertiaTriple got = inertia_symmetric(w);
    const InertiaTriple want{cert.ds[i], 0, n - cert.ds[i]};
    rep.add({tag + " inertia", 0.0, 0.0, got == want, "got " + to_string(got) + ", want " + to_string(want)});
    if (!(got == want)) diag << tag << " inertia " << to_string(got) << " != " << to_string(want) << "; ";

    const double bound = slack * spectral_norm(w);
    const double m = w_margin(a, b, w, cert.mus[i]);
    rep.add({tag + " rate inequality", m, bound, m < bound, ""});
    if (!(m < bound)) diag << tag << " rate inequality margin " << m << "; ";

    if (cert.colinear && b.cols() > 0 && got.zero == 0) {
      const Matrix g = b.transpose() * w.inverse();
      if (i == 0) {
        g0 = g;
      } else {
        const double dev = (g - g0).norm();
        const double tol = 1e-6 * std::max(g0.norm(), std::numeric_limits<double>::min());
        rep.add({tag + " colinearity", dev, tol, dev <= tol, ""});
        if (dev > tol) diag << tag << " colinearity deviation " << dev << "; ";
      }
    }
  }
  const double rs = cert.rate_sum();
  rep.add({"weighted rate sum", rs, 0.0, rs <= 0.0, ""});
  if (rs > 0.0) diag << "weighted rate sum " << rs << " > 0; ";
  rep.diagnostics = diag.str();
  rep.finalize();
  return rep;
}

Matrix synthesize_gain(const StabilizabilityCertificate& cert, const Matrix& b, double rho) {
  if (!(rho >= 1.0)) throw std::invalid_argument("synthesize_gain: rho must be >= 1");
  if (!cert.colinear) throw std::invalid_argument("synthesize_gain: certificate is not colinear");
  if (cert.mats.empty()) throw std::invalid_argument("synthesize_gain: empty certificate");
  const Matrix w0 = symmetrize(cert.mats[0]);
  if (w0.rows() != b.rows()) throw std::invalid_argument("synthesize_gain: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(w0);
  if (!lu.isInvertible()) throw NumericError("synthesize_gain: W0 is singular");
  return 0.5 * rho * b.transpose() * lu.inverse();
}

}  // namespace kc
