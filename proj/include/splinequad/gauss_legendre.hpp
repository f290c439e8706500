#pragma once

#include <vector>

#include "splinequad/knot_vector.hpp"
#include "splinequad/quadrature_rule.hpp"

namespace splinequad {

/// q-point Gauss-Legendre rule on [-1,1], nodes ascending.
struct ElementRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on P_q from Chebyshev-type guesses. Throws if a root does
/// not converge within 100 steps.
ElementRule legendre_rule(int q);

/// Per-element (d+1)/2-point Gauss rule over a discontinuous space of odd
/// degree d. Nodes run ascending, element by element.
QuadratureRule source_rule(const SplineSpace& source);

/// The q-point rule mapped onto every element of `knots`.
QuadratureRule element_gauss_rule(const KnotVector& knots, int q);

}  // namespace splinequad
