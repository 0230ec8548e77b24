#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kcontract/io/model_spec.hpp"

namespace kc::io {

/// Bounding box of trajectories on [0, t_end], widened on each side by
/// `inflate` times the half-width.
Box trajectory_box(const VectorField& field, const std::vector<Vector>& x0s, double t_end, double h, double inflate);

/// Initial conditions of the three modified-Rossler runs.
std::vector<Vector> rossler_mod_initial_conditions();

struct BundleResult {
  bool ok = false;
  json report;
};

/// Runs one of: rossler, rossler_mod, synchronverter, example25.
BundleResult reproduce(const std::string& name, std::uint64_t seed = 0);

}  // namespace kc::io
