#pragma once

#include <string>

#include "kcontract/io/model_spec.hpp"
#include "kcontract/lin_synthesis.hpp"
#include "kcontract/nl_verify.hpp"

namespace kc::io {

/// Symmetric matrix from JSON. Asymmetric input (e.g. printed rounding) is
/// replaced by (M + M^T)/2 and the largest |M - M^T| entry is returned in
/// `asymmetry`.
Matrix symmetric_from_json(const json& j, const std::string& what, double* asymmetry = nullptr);

struct LoadedNlCertificate {
  NonlinearCertificate cert;
  /// Matrices were printed with a few digits; callers verify at slack 1e-2.
  bool printed_precision = false;
  double asymmetry = 0.0;
  std::string source;
};

LoadedNlCertificate nl_certificate_from_json(const json& j);
json nl_certificate_to_json(const NonlinearCertificate& c);

ContractionCertificate lin_certificate_from_json(const json& j);
json lin_certificate_to_json(const ContractionCertificate& c);
json stabilizability_certificate_to_json(const StabilizabilityCertificate& c);

/// Printed gain-design data: W0, W1, mu0, mu1, k, and the reported K, Q, eta.
struct DesignData {
  Matrix w0, w1, q, k_printed;
  double mu0 = 0.0, mu1 = 0.0, eta = 0.0, omega_printed = 0.0;
  int k = 2;
  double asymmetry_w1 = 0.0;
  double asymmetry_q = 0.0;
};
DesignData design_data_from_json(const json& j);

json read_json_file(const std::string& path);
/// Path of a file shipped under data/certificates.
std::string data_file(const std::string& name);

}  // namespace kc::io
