#pragma once

#include <vector>

#include "kcontract/numkernel.hpp"
#include "kcontract/report.hpp"

namespace kc {

/// Multi-rate Lyapunov certificate for an LTI system.
/// ds has ell + 1 entries, d_0 = 0; weights are h_i = d_{i+1} - d_i.
struct ContractionCertificate {
  int ell = 0;
  std::vector<double> mus;
  std::vector<int> ds;
  std::vector<Matrix> mats;

  std::vector<int> weights() const;
  double rate_sum() const;
};

/// Sum of the k largest real parts of the spectrum.
double eigen_sum_max(const Matrix& a, int k);

/// holds iff eigen_sum_max(a, k) < 0; margin = eigen_sum_max.
DefiniteResult k_contractive_lti(const Matrix& a, int k);

/// P solving (A - mu I)^T P + P (A - mu I) = -I. Its inertia is
/// (#{Re lambda > mu}, 0, #{Re lambda < mu}).
Matrix shifted_inertia_certificate(const Matrix& a, double mu);

/// Builds a certificate from the grouped spectrum. Throws ConditionViolation
/// when A is not k-contractive, NumericError if no epsilon works.
ContractionCertificate build_certificate(const Matrix& a, int k);

/// Relative slack: the i-th inequality must have lambda_max < slack * ||P_i||.
VerificationReport verify_certificate(const Matrix& a, int k, const ContractionCertificate& cert,
                                      double slack = 0.0);

struct VariableCounts {
  long long n1 = 0;  // compound LMI: one symmetric C(n,k) matrix + rate
  long long n2 = 0;  // k inertia-constrained n x n matrices + k rates
};

VariableCounts variable_counts(int n, int k);

/// Distinct real parts (descending) and their multiplicities, grouped with
/// tolerance 1e-8 (1 + |alpha|).
struct RealPartGroups {
  std::vector<double> alphas;
  std::vector<int> mult;
};
RealPartGroups group_real_parts(const Spectrum& spec);

}  // namespace kc
