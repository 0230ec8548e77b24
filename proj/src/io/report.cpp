#include "kcontract/io/report.hpp"

#include <cmath>
#include <cstdio>

namespace kc::io {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

json check_to_json(const ConditionCheck& c) {
  json j = {{"label", c.label}, {"margin", number_or_null(c.margin)}, {"bound", number_or_null(c.bound)},
            {"holds", c.holds}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

json report_to_json(const VerificationReport& rep, const json& inputs) {
  json margins = json::array();
  json anchors = json::array();
  for (const auto& c : rep.checks) {
    margins.push_back(check_to_json(c));
    anchors.push_back(c.label);
  }
  json j;
  j["verdict"] = rep.accept ? "accept" : "reject";
  j["margins"] = margins;
  j["anchors"] = anchors;
  j["inputs_digest"] = fnv1a_hex(inputs.dump());
  if (!rep.diagnostics.empty()) j["diagnostics"] = rep.diagnostics;
  if (!rep.certifying) j["certifying"] = false;
  return j;
}

json bare_report(bool accept, const json& inputs) {
  return {{"verdict", accept ? "accept" : "reject"},
          {"margins", json::array()},
          {"anchors", json::array()},
          {"inputs_digest", fnv1a_hex(inputs.dump())}};
}

}  // namespace kc::io
