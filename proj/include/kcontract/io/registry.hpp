#pragma once

#include <string>
#include <vector>

#include "kcontract/io/model_spec.hpp"

namespace kc::io {

/// rossler, rossler_mod, synchronverter, example25.
std::vector<std::string> builtin_names();

/// Expanded spec of a builtin with parameter overrides. Unknown names or
/// parameters throw ModelError.
ModelSpec builtin_model(const std::string& name, const json& params = json::object());

}  // namespace kc::io
