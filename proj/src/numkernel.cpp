#include "kcontract/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace kc {

std::string to_string(const InertiaTriple& in) {
  std::ostringstream os;
  os << "(" << in.neg << "," << in.zero << "," << in.pos << ")";
  return os.str();
}

std::vector<double> Spectrum::real_parts() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.real());
  return out;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw std::invalid_argument(os.str());
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

void require_symmetric(const Matrix& s, const char* what) {
  require_square(s, what);
  require_finite(s, what);
  if (s.size() == 0) return;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream os;
    os << what << ": matrix is not symmetric (max asymmetry " << asym << ")";
    throw std::invalid_argument(os.str());
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Spectrum eigenvalues(const Matrix& m) {
  require_square(m, "eigenvalues");
  require_finite(m, "eigenvalues");
  Spectrum spec;
  if (m.rows() == 0) return spec;
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericError("eigenvalues: QR iteration did not converge");
  }
  const auto& ev = es.eigenvalues();
  spec.values.assign(ev.data(), ev.data() + ev.size());
  std::sort(spec.values.begin(), spec.values.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  return spec;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double max_eig_sym(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  return es.eigenvalues()(s.rows() - 1);
}

InertiaTriple inertia_symmetric(const Matrix& s, double zero_tol) {
  require_symmetric(s, "inertia_symmetric");
  InertiaTriple in;
  if (s.rows() == 0) return in;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  const double cut = zero_tol * norm;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -cut) {
      ++in.neg;
    } else if (ev(i) > cut) {
      ++in.pos;
    } else {
      ++in.zero;
    }
  }
  return in;
}

namespace {

// vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P), column-major vec.
Matrix lyapunov_operator(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix kron = Matrix::Zero(n * n, n * n);
  const Matrix at = a.transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    kron.block(j * n, j * n, n, n) += at;
    for (Eigen::Index l = 0; l < n; ++l) {
      const double c = at(j, l);
      if (c != 0.0) kron.block(j * n, l * n, n, n).diagonal().array() += c;
    }
  }
  return kron;
}

void check_lyapunov_residual(const Matrix& a, const Matrix& q, const Matrix& p, const char* who) {
  const double res = (a.transpose() * p + p * a + q).norm();
  const double bound = 1e-8 * (a.norm() * p.norm() + q.norm());
  if (!std::isfinite(res) || res > bound) {
    std::ostringstream os;
    os << who << ": residual " << res << " exceeds bound " << bound << " (ill-conditioned spectrum)";
    throw NumericError(os.str());
  }
}

}  // namespace

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  require_square(a, "solve_lyapunov(A)");
  require_finite(a, "solve_lyapunov(A)");
  require_symmetric(q, "solve_lyapunov(Q)");
  const Eigen::Index n = a.rows();
  if (q.rows() != n) throw std::invalid_argument("solve_lyapunov: A and Q dimensions differ");
  if (n == 0) return Matrix(0, 0);

  // Solvable iff lambda_i + lambda_j != 0 for every pair.
  const Spectrum spec = eigenvalues(a);
  const double scale = 1.0 + a.cwiseAbs().rowwise().sum().maxCoeff();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (std::size_t j = i; j < spec.size(); ++j) {
      if (std::abs(spec[i] + spec[j]) <= 1e-10 * scale) {
        std::ostringstream os;
        os << "solve_lyapunov: resonant eigenvalue pair lambda_" << i + 1 << " = " << spec[i]
           << ", lambda_" << j + 1 << " = " << spec[j] << " (sum ~ 0); Sylvester system is singular";
        throw NumericError(os.str());
      }
    }
  }

  Eigen::FullPivLU<Matrix> lu(lyapunov_operator(a));
  if (!lu.isInvertible()) throw NumericError("solve_lyapunov: Kronecker system is singular");
  const Vector x = lu.solve(-Eigen::Map<const Vector>(q.data(), n * n));
  const Matrix p = symmetrize(Eigen::Map<const Matrix>(x.data(), n, n));
  check_lyapunov_residual(a, q, p, "solve_lyapunov");
  return p;
}

Matrix solve_lyapunov_lstsq(const Matrix& a, const Matrix& q) {
  require_square(a, "solve_lyapunov_lstsq(A)");
  require_finite(a, "solve_lyapunov_lstsq(A)");
  require_symmetric(q, "solve_lyapunov_lstsq(Q)");
  const Eigen::Index n = a.rows();
  if (q.rows() != n) throw std::invalid_argument("solve_lyapunov_lstsq: A and Q dimensions differ");
  if (n == 0) return Matrix(0, 0);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(lyapunov_operator(a));
  cod.setThreshold(1e-12);
  const Vector x = cod.solve(-Eigen::Map<const Vector>(q.data(), n * n));
  const Matrix p = symmetrize(Eigen::Map<const Matrix>(x.data(), n, n));
  check_lyapunov_residual(a, q, p, "solve_lyapunov_lstsq");
  return p;
}

DefiniteResult is_neg_def(const Matrix& s, double slack) {
  require_symmetric(s, "is_neg_def");
  DefiniteResult r;
  if (s.rows() == 0) {
    r.holds = true;
    r.margin = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.margin = max_eig_sym(symmetrize(s));
  r.holds = r.margin < slack;
  return r;
}

}  // namespace kc
