#pragma once

#include <cstdint>

#include "kcontract/nl_model.hpp"
#include "kcontract/report.hpp"

namespace kc {

/// Constant-metric pair: P0 > 0 with rate mu0, P1 of inertia
/// (k-1, 0, n-k+1) with rate mu1, and mu1 + (k-1) mu0 < 0.
struct NonlinearCertificate {
  Matrix p0;
  Matrix p1;
  double mu0 = 0.0;
  double mu1 = 0.0;
  int k = 2;
};

/// Checks J^T P_i + P_i J < 2 mu_i P_i at every envelope vertex. Slack is
/// relative: the threshold for condition i is slack * ||P_i||_2.
/// Structural failures (inertia, rate sum) reject; dimension mismatch throws.
VerificationReport verify_nl_certificate(const NonlinearModel& model, const Box& box,
                                         const NonlinearCertificate& cert, double slack = 0.0);

/// Q J^[k] + J^[k]^T Q <= -eta I at every vertex, threshold slack * ||Q||_2.
/// Throws std::invalid_argument if Q is not positive definite or eta <= 0.
VerificationReport verify_compound_condition(const NonlinearModel& model, const Box& box, const Matrix& q,
                                             double eta, int k, double slack = 0.0);

struct NlGainResult {
  Matrix K;
  double omega = 0.0;
  double omega_bar = 0.0;
  /// (k-1) mu0 + mu1 + omega < 0 and both vertex conditions hold.
  bool certified = false;
  VerificationReport report;
};

/// Thrown when a vertex condition of the gain construction fails. The
/// partially filled result (gain, omega, per-vertex margins) is attached.
class GainConditionError : public ConditionViolation {
 public:
  GainConditionError(const std::string& what, NlGainResult r) : ConditionViolation(what), result(std::move(r)) {}
  NlGainResult result;
};

/// K = 1/2 B^T (W0^{-1} + W1^{-1}); omega = (k-1) omega_bar with
/// omega_bar = max(lambda_max(W0^{-1} M W0 M^T) - 1, 0) + 1e-9,
/// M = I - 1/2 B B^T W1^{-1}.
NlGainResult synthesize_nl_gain(const NonlinearModel& model, const Box& box, const Matrix& w0, const Matrix& w1,
                                double mu0, double mu1, const Matrix& b, int k);

struct SearchBudget {
  /// Rate candidates tried for mu1.
  int restarts = 12;
  /// Ellipsoid iterations per feasibility solve.
  int iterations = 4000;
  std::uint64_t seed = 0;
};

struct SearchResult {
  bool success = false;
  NonlinearCertificate cert;
  VerificationReport report;
  std::string message;
};

/// Best-effort search for a constant-metric pair. Success is declared only
/// when verify_nl_certificate accepts the result at slack 0.
SearchResult search_nl_certificate(const NonlinearModel& model, const Box& box, int k,
                                   const SearchBudget& budget = {});

/// Worst-case (over vertices) lambda_max(J^T P + P J - 2 mu P) and its vertex.
struct VertexMargin {
  double margin = 0.0;
  std::size_t vertex = 0;
};
VertexMargin worst_vertex_margin(const std::vector<Matrix>& vertices, const Matrix& p, double mu);

}  // namespace kc
