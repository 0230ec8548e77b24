#include "kcontract/io/certificates.hpp"

#include <fstream>
#include <sstream>

namespace kc::io {

Matrix symmetric_from_json(const json& j, const std::string& what, double* asymmetry) {
  const Matrix m = matrix_from_json(j, what);
  if (m.rows() != m.cols()) throw ModelError(what + ": expected a square matrix");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry) *asymmetry = std::max(*asymmetry, asym);
  return symmetrize(m);
}

LoadedNlCertificate nl_certificate_from_json(const json& j) {
  LoadedNlCertificate out;
  try {
    out.cert.k = j.at("k").get<int>();
    out.cert.mu0 = j.at("mu0").get<double>();
    out.cert.mu1 = j.at("mu1").get<double>();
    out.cert.p0 = symmetric_from_json(j.at("P0"), "P0", &out.asymmetry);
    out.cert.p1 = symmetric_from_json(j.at("P1"), "P1", &out.asymmetry);
    out.printed_precision = j.value("printed_precision", false);
    out.source = j.value("source", "");
  } catch (const json::exception& e) {
    throw ModelError(std::string("certificate: ") + e.what());
  }
  if (out.cert.p0.rows() != out.cert.p1.rows()) throw ModelError("certificate: P0 and P1 differ in size");
  return out;
}

json nl_certificate_to_json(const NonlinearCertificate& c) {
  return {{"k", c.k}, {"mu0", c.mu0}, {"mu1", c.mu1}, {"P0", matrix_to_json(c.p0)}, {"P1", matrix_to_json(c.p1)}};
}

ContractionCertificate lin_certificate_from_json(const json& j) {
  ContractionCertificate c;
  try {
    c.ell = j.at("ell").get<int>();
    c.mus = j.at("mus").get<std::vector<double>>();
    c.ds = j.at("ds").get<std::vector<int>>();
    const json& mats = j.contains("mats") ? j["mats"] : j.at("Ws");
    for (const auto& m : mats) c.mats.push_back(symmetric_from_json(m, "certificate matrix"));
  } catch (const json::exception& e) {
    throw ModelError(std::string("certificate: ") + e.what());
  }
  return c;
}

json lin_certificate_to_json(const ContractionCertificate& c) {
  json mats = json::array();
  for (const auto& m : c.mats) mats.push_back(matrix_to_json(m));
  return {{"ell", c.ell}, {"mus", c.mus}, {"ds", c.ds}, {"weights", c.weights()}, {"mats", mats}};
}

json stabilizability_certificate_to_json(const StabilizabilityCertificate& c) {
  json j = lin_certificate_to_json(c);
  j["Ws"] = j["mats"];
  j.erase("mats");
  j["colinear"] = c.colinear;
  return j;
}

DesignData design_data_from_json(const json& j) {
  DesignData d;
  try {
    d.w0 = symmetric_from_json(j.at("W0"), "W0");
    d.w1 = symmetric_from_json(j.at("W1"), "W1", &d.asymmetry_w1);
    d.q = symmetric_from_json(j.at("Q"), "Q", &d.asymmetry_q);
    d.k_printed = matrix_from_json(j.at("K"), "K");
    d.mu0 = j.at("mu0").get<double>();
    d.mu1 = j.at("mu1").get<double>();
    d.eta = j.at("eta").get<double>();
    d.omega_printed = j.value("omega", 0.0);
    d.k = j.value("k", 2);
  } catch (const json::exception& e) {
    throw ModelError(std::string("design data: ") + e.what());
  }
  return d;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

std::string data_file(const std::string& name) { return std::string(KC_DATA_DIR) + "/certificates/" + name; }

}  // namespace kc::io
