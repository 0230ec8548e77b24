#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a numerical routine cannot produce a trustworthy answer
/// (non-convergence, singular systems, resonant spectra).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input is well formed but fails a mathematical
/// precondition (e.g. the system is not k-contractive). Callers treat this
/// as a legitimate negative outcome, not a usage error.
class ConditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counts of eigenvalues with negative, zero and positive real part.
struct InertiaTriple {
  int neg = 0;
  int zero = 0;
  int pos = 0;

  int dim() const { return neg + zero + pos; }
  friend bool operator==(const InertiaTriple&, const InertiaTriple&) = default;
};

std::string to_string(const InertiaTriple& in);

/// Eigenvalues ordered by nonincreasing real part, ties broken by
/// nonincreasing imaginary part.
struct Spectrum {
  std::vector<std::complex<double>> values;

  std::size_t size() const { return values.size(); }
  const std::complex<double>& operator[](std::size_t i) const { return values[i]; }
  std::vector<double> real_parts() const;
};

/// Result of a definiteness test: `holds` plus the largest eigenvalue.
struct DefiniteResult {
  bool holds = false;
  double margin = 0.0;
};

inline constexpr double kDefaultZeroTol = 1e-9;

void require_square(const Matrix& m, const char* what);
void require_finite(const Matrix& m, const char* what);
/// Throws std::invalid_argument when max|S - S^T| > 1e-12 * max(1, max|S|).
void require_symmetric(const Matrix& s, const char* what);

Matrix symmetrize(const Matrix& m);

Spectrum eigenvalues(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// Largest eigenvalue of a symmetric matrix.
double max_eig_sym(const Matrix& s);

/// Inertia of a symmetric matrix; eigenvalues within zero_tol * ||S||_2 of
/// zero are counted as zero.
InertiaTriple inertia_symmetric(const Matrix& s, double zero_tol = kDefaultZeroTol);

/// Unique symmetric P with A^T P + P A = -Q, by Kronecker vectorization.
/// Throws NumericError naming the eigenvalue pair when lambda_i + lambda_j ~ 0.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// Minimum-norm solution of the same system; for resonant A when Q happens to
/// be consistent. Throws NumericError if the residual check fails.
Matrix solve_lyapunov_lstsq(const Matrix& a, const Matrix& q);

/// true iff lambda_max(S) < slack. The margin is lambda_max(S).
DefiniteResult is_neg_def(const Matrix& s, double slack = 0.0);

}  // namespace kc
