#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "splinequad/continuation.hpp"

namespace splinequad {

struct ValidationReport {
  double residual_norm = 0.0;
  double max_basis_error = 0.0;
  int worst_basis = -1;
  int samples = 0;
  double max_random_error = 0.0;
  double max_random_relative = 0.0;  // error / (|c|_2 (b-a))
  bool passed = false;
  std::string reason;
};

/// Exactness on every basis function, plus `samples` random splines with
/// coefficients uniform in [0, 0.5] from a seeded mt19937_64. Passes when
/// every defect is at most tol (b-a) and every relative random error at
/// most tol.
ValidationReport validate_rule(const SplineSpace& space, const QuadratureRule& rule,
                               double tol, int samples = 100,
                               std::uint64_t seed = 20240531);

nlohmann::json to_json(const ValidationReport& r);

}  // namespace splinequad
