#include "kcontract/lin_contraction.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kcontract/compound.hpp"

namespace kc {

namespace {

void check_k(const Matrix& a, int k, const char* what) {
  require_square(a, what);
  if (k < 1 || k > a.rows()) {
    std::ostringstream os;
    os << what << ": k = " << k << " out of range [1, " << a.rows() << "]";
    throw std::invalid_argument(os.str());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<int> ContractionCertificate::weights() const {
  std::vector<int> h;
  for (std::size_t i = 0; i + 1 < ds.size(); ++i) h.push_back(ds[i + 1] - ds[i]);
  return h;
}

double ContractionCertificate::rate_sum() const {
  const auto h = weights();
  double s = 0.0;
  for (std::size_t i = 0; i < h.size() && i < mus.size(); ++i) s += h[i] * mus[i];
  return s;
}

double eigen_sum_max(const Matrix& a, int k) {
  check_k(a, k, "eigen_sum_max");
  const Spectrum spec = eigenvalues(a);
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += spec[i].real();
  return s;
}

DefiniteResult k_contractive_lti(const Matrix& a, int k) {
  DefiniteResult r;
  r.margin = eigen_sum_max(a, k);
  r.holds = r.margin < 0.0;
  return r;
}

Matrix shifted_inertia_certificate(const Matrix& a, double mu) {
  require_square(a, "shifted_inertia_certificate");
  const Eigen::Index n = a.rows();
  const Spectrum spec = eigenvalues(a);
  int above = 0;
  for (const auto& l : spec.values) {
    if (std::abs(l.real() - mu) <= 1e-9 * (1.0 + std::abs(mu))) {
      std::ostringstream os;
      os << "shifted_inertia_certificate: mu = " << mu << " lies on the real part of eigenvalue " << l;
      throw NumericError(os.str());
    }
    if (l.real() > mu) ++above;
  }
  const Matrix shifted = a - mu * Matrix::Identity(n, n);
  Matrix p;
  try {
    p = solve_lyapunov(shifted, Matrix::Identity(n, n));
  } catch (const NumericError&) {
    // eigenvalues mirrored about mu; the system is singular but may be consistent
    p = solve_lyapunov_lstsq(shifted, Matrix::Identity(n, n));
  }
  const InertiaTriple got = inertia_symmetric(p);
  const InertiaTriple want{above, 0, static_cast<int>(n) - above};
  if (!(got == want)) {
    throw NumericError("shifted_inertia_certificate: computed inertia " + to_string(got) +
                       " differs from eigenvalue count " + to_string(want));
  }
  return p;
}

RealPartGroups group_real_parts(const Spectrum& spec) {
  RealPartGroups g;
  for (const auto& l : spec.values) {
    const double re = l.real();
    if (!g.alphas.empty() && g.alphas.back() - re < 1e-8 * (1.0 + std::abs(g.alphas.back()))) {
      ++g.mult.back();
    } else {
      g.alphas.push_back(re);
      g.mult.push_back(1);
    }
  }
  return g;
}

ContractionCertificate build_certificate(const Matrix& a, int k) {
  check_k(a, k, "build_certificate");
  const int n = static_cast<int>(a.rows());
  const Spectrum spec = eigenvalues(a);
  double s0 = 0.0;
  for (int i = 0; i < k; ++i) s0 += spec[i].real();
  if (!(s0 < 0.0)) {
    throw ConditionViolation("build_certificate: sum of the " + std::to_string(k) +
                             " largest real parts is " + fmt(s0) + " >= 0; not k-contractive");
  }

  const RealPartGroups g = group_real_parts(spec);
  const int q = static_cast<int>(g.alphas.size());
  // Partial sums d̄_i; d̄_0 = 0.
  std::vector<int> dbar(q + 1, 0);
  for (int i = 0; i < q; ++i) dbar[i + 1] = dbar[i] + g.mult[i];
  int ck = 0;
  for (int i = 0; i <= q; ++i)
    if (dbar[i] <= k - 1) ++ck;
  const int ell = ck;

  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < q; ++i) gap = std::min(gap, g.alphas[i] - g.alphas[i + 1]);
  double eps = std::min(gap / 2.0, std::abs(s0) / (k + n));

  std::string last_error;
  for (int attempt = 0; attempt <= 40; ++attempt, eps /= 2.0) {
    ContractionCertificate cert;
    cert.ell = ell;
    cert.ds.assign(dbar.begin(), dbar.begin() + ell);
    cert.ds.push_back(k);
    try {
      for (int i = 0; i < ell; ++i) {
        const double mu = g.alphas[i] + eps;
        cert.mus.push_back(mu);
        cert.mats.push_back(shifted_inertia_certificate(a, mu));
      }
    } catch (const NumericError& e) {
      last_error = e.what();
      continue;
    }
    if (cert.rate_sum() > 0.0) {
      last_error = "weighted rate sum " + fmt(cert.rate_sum()) + " > 0";
      continue;
    }
    const VerificationReport rep = verify_certificate(a, k, cert, 0.0);
    if (rep.accept) return cert;
    last_error = "self-check failed: " + rep.diagnostics;
  }
  throw NumericError("build_certificate: no admissible epsilon after 40 halvings (" + last_error + ")");
}

VerificationReport verify_certificate(const Matrix& a, int k, const ContractionCertificate& cert,
                                      double slack) {
  check_k(a, k, "verify_certificate");
  const int n = static_cast<int>(a.rows());
  const int ell = cert.ell;
  if (ell < 1 || static_cast<int>(cert.mus.size()) != ell || static_cast<int>(cert.mats.size()) != ell ||
      static_cast<int>(cert.ds.size()) != ell + 1) {
    throw std::invalid_argument("verify_certificate: certificate lists do not match ell");
  }
  for (const auto& p : cert.mats) {
    if (p.rows() != n || p.cols() != n) throw std::invalid_argument("verify_certificate: dimension mismatch");
  }

  VerificationReport rep;
  std::ostringstream diag;

  bool ordered = cert.ds[0] == 0;
  for (int i = 0; i + 1 <= ell; ++i) ordered = ordered && cert.ds[i] < cert.ds[i + 1];
  ordered = ordered && cert.ds[ell - 1] <= k - 1 && cert.ds[ell] <= k;
  rep.add({"index structure d_0 = 0 < ... < d_ell <= k", 0.0, 0.0, ordered, ""});
  if (!ordered) diag << "index list violates ordering; ";

  for (int i = 0; i < ell; ++i) {
    const Matrix p = symmetrize(cert.mats[i]);
    const std::string tag = "P" + std::to_string(i);
    const InertiaTriple got = inertia_symmetric(p);
    const InertiaTriple want{cert.ds[i], 0, n - cert.ds[i]};
    ConditionCheck ic{tag + " inertia", 0.0, 0.0, got == want,
                      "got " + to_string(got) + ", want " + to_string(want)};
    if (!ic.holds) diag << tag << " inertia " << to_string(got) << " != " << to_string(want) << "; ";
    rep.add(ic);

    const Matrix lhs = a.transpose() * p + p * a - 2.0 * cert.mus[i] * p;
    const double bound = slack * spectral_norm(p);
    const DefiniteResult nd = is_neg_def(symmetrize(lhs), bound);
    ConditionCheck rc{tag + " rate inequality", nd.margin, bound, nd.holds, "mu = " + fmt(cert.mus[i])};
    if (!rc.holds) diag << tag << " rate inequality margin " << nd.margin << "; ";
    rep.add(rc);
  }
  const double rs = cert.rate_sum();
  ConditionCheck sc{"weighted rate sum", rs, 0.0, rs <= 0.0, ""};
  if (!sc.holds) diag << "weighted rate sum " << rs << " > 0; ";
  rep.add(sc);
  rep.diagnostics = diag.str();
  rep.finalize();
  return rep;
}

VariableCounts variable_counts(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("variable_counts: k out of range");
  const long long c = binomial(n, k);
  VariableCounts v;
  v.n1 = c * (c + 1) / 2 + 1;
  v.n2 = static_cast<long long>(k) * n * (n - 1) / 2 + k;
  return v;
}

}  // namespace kc
