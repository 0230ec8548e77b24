#pragma once

#include "kcontract/lin_contraction.hpp"

namespace kc {

/// Controllable/uncontrollable split. With z = T x the system matrices read
///   T A T^T = [[Ac, A12], [0, Au]],  T B = [[Bc], [0]].
/// T is orthogonal.
struct KalmanDecomposition {
  Matrix T;
  Matrix Ac, A12, Au, Bc;
  int nc = 0;
  int nu = 0;
};

KalmanDecomposition kalman_decompose(const Matrix& a, const Matrix& b);

struct StabilizabilityTest {
  bool holds = false;
  int nu = 0;
  /// eigen_sum_max(Au, k) when nu >= k, otherwise -inf.
  double margin = 0.0;
  std::string diagnostics;
};

StabilizabilityTest k_order_stabilizable(const Matrix& a, const Matrix& b, int k);

/// Symmetric W with W A^T + A W - B B^T < 2 mu W and inertia (rho, 0, n - rho),
/// rho = #{Re lambda(Au) > mu}. Throws NumericError if mu sits on Au's real
/// parts or the kappa halving runs out.
Matrix construct_W(const Matrix& a, const Matrix& b, double mu, const KalmanDecomposition& kd);

struct StabilizabilityCertificate : ContractionCertificate {
  bool colinear = false;
};

/// Throws ConditionViolation when the pair is not k-order stabilizable.
StabilizabilityCertificate stabilizability_certificate(const Matrix& a, const Matrix& b, int k);

/// Checks inertia, W_i A^T + A W_i - B B^T < 2 mu_i W_i (relative slack),
/// the weighted rate sum and, if claimed, colinearity of B^T W_i^{-1}.
VerificationReport verify_stabilizability_certificate(const Matrix& a, const Matrix& b, int k,
                                                      const StabilizabilityCertificate& cert,
                                                      double slack = 0.0);

/// K = (rho / 2) B^T W_0^{-1}.
Matrix synthesize_gain(const StabilizabilityCertificate& cert, const Matrix& b, double rho = 1.0);

}  // namespace kc
