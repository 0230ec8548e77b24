#pragma once

#include <string>
#include <vector>

namespace kc {

/// One checked condition. For matrix inequalities `margin` is lambda_max of
/// the tested matrix and `bound` the threshold it must stay below.
struct ConditionCheck {
  std::string label;
  double margin = 0.0;
  double bound = 0.0;
  bool holds = false;
  std::string detail;
};

struct VerificationReport {
  bool accept = false;
  std::vector<ConditionCheck> checks;
  std::string diagnostics;
  /// false when a check ran on samples rather than on a certifying set.
  bool certifying = true;

  void add(ConditionCheck c) {
    checks.push_back(std::move(c));
  }
  /// accept := every check holds (and at least one check was made).
  void finalize() {
    accept = !checks.empty();
    for (const auto& c : checks) accept = accept && c.holds;
  }
  const ConditionCheck* find(const std::string& label_prefix) const {
    for (const auto& c : checks)
      if (c.label.rfind(label_prefix, 0) == 0) return &c;
    return nullptr;
  }
};

}  // namespace kc
