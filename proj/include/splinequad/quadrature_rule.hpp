#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splinequad/knot_vector.hpp"

namespace splinequad {

struct TraceStats {
  int steps_taken = 0;
  int newton_failures = 0;
  double t_reached = 0.0;
};

/// Nodes ascending in [a,b] with matching weights.
struct QuadratureRule {
  Interval interval;
  std::vector<double> nodes;
  std::vector<double> weights;
  double residual_norm = 0.0;

  int degree = 0;
  std::optional<int> continuity;
  std::vector<double> breaks;
  std::vector<int> mults;
  std::optional<TraceStats> trace;

  std::size_t size() const { return nodes.size(); }
  /// Records the target space's degree and knots on the rule.
  void describe(const SplineSpace& space);
};

}  // namespace splinequad
