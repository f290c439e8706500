#pragma once

#include <optional>
#include <vector>

#include "splinequad/continuation.hpp"
#include "splinequad/quadrature_rule.hpp"

namespace splinequad {

/// Interior rule on the infinite grid of unit elements with interior
/// multiplicity d-c. Offsets lie in [0, period) and repeat with the period.
struct AsymptoticPattern {
  int degree = 0;
  int continuity = 0;
  int period = 1;
  std::vector<double> offsets;
  std::vector<double> weights;
  double residual_norm = 0.0;

  /// Offsets falling in unit element e of the period (0 <= e < period).
  std::vector<std::size_t> element_nodes(int e) const;
};

/// Closed or tabulated constants for (5,0) (5,1) (5,2) (5,3) (7,0) (7,1)
/// (9,1); any other pair goes through solve_asymptotic_system.
AsymptoticPattern asymptotic_rule(int d, int c);

/// Every exact pattern found by Gauss-Newton from the symmetric ansatz
/// candidates (knot and midpoint nodes plus symmetric pairs).
std::vector<AsymptoticPattern> asymptotic_candidates(int d, int c);

/// The exact symmetric pattern; when several exist, the one matching the
/// middle element of a traced rule on 31 elements. Throws
/// std::runtime_error when none converges.
AsymptoticPattern solve_asymptotic_system(int d, int c);

/// Exactness defects of the pattern, one per basis-function shape and shift.
std::vector<double> pattern_residual(const AsymptoticPattern& p);

/// Boundary element counts after which traced rules agree with the pattern
/// to double precision; empty for continuity >= 2.
std::optional<int> default_boundary_depth(int d, int c);

struct Deviation {
  double node = 0.0;
  double weight = 0.0;
};

/// Largest node and weight differences between the nodes of a uniform rule
/// in element `e` and the nearest pattern nodes. Distances are in units of
/// the element width. A period-two pattern is compared in whichever phase
/// fits the element better.
Deviation element_deviation(const QuadratureRule& rule, int elements,
                            const AsymptoticPattern& pattern, int e);

/// Traced nodes on the first `depth` elements, mirrored on the right, with
/// the asymptotic pattern in between. Uniform target with N elements on
/// `interval`.
QuadratureRule hybrid_rule(int d, int c, int N, int depth,
                           Interval interval = {0.0, 0.0},
                           const TraceConfig& cfg = {});

}  // namespace splinequad
