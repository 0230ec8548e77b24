#pragma once

#include <cstdint>
#include <string>

#include "kcontract/io/model_spec.hpp"
#include "kcontract/report.hpp"

namespace kc::io {

/// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

json check_to_json(const ConditionCheck& c);

/// {verdict, margins[], anchors[], inputs_digest, diagnostics, certifying}.
/// The digest is taken over the canonical dump of `inputs`.
json report_to_json(const VerificationReport& rep, const json& inputs);

/// Empty report skeleton for commands without matrix checks.
json bare_report(bool accept, const json& inputs);

}  // namespace kc::io
