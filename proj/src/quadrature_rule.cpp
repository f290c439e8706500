#include "splinequad/quadrature_rule.hpp"

namespace splinequad {

void QuadratureRule::describe(const SplineSpace& space) {
  degree = space.degree();
  continuity = space.uniform_continuity();
  breaks = space.knots().breaks();
  mults = space.knots().mults();
}

}  // namespace splinequad
