#pragma once

#include <span>
#include <vector>

#include "splinequad/knot_vector.hpp"

namespace splinequad {

/// The degree+1 B-splines that may be nonzero at a point, starting at
/// `first_index`. Entries past the last basis function are zero.
struct BasisEvaluation {
  int first_index = 0;
  std::vector<double> values;
  std::vector<double> derivatives;
};

/// Normalized B-splines and first derivatives at u. Right limits are used at
/// knots, except at the domain's right end and at the last knot.
BasisEvaluation eval(const SplineSpace& space, double u);

/// Integral of basis function i over its whole support,
/// (t[i+d+1] - t[i]) / (d+1).
double integral(const SplineSpace& space, int i);

/// Integral of basis function i restricted to the space's domain.
double domain_integral(const SplineSpace& space, int i);

/// domain_integral for every basis function.
std::vector<double> domain_integrals(const SplineSpace& space);

double eval_spline(const SplineSpace& space, std::span<const double> coeffs,
                   double u);

struct BSplinePoint {
  double value = 0.0;
  double derivative = 0.0;
};

/// A single B-spline of degree knots.size()-2 given by its own knots,
/// right-continuous, zero outside [knots.front(), knots.back()).
BSplinePoint single_bspline(std::span<const double> knots, double u);

}  // namespace splinequad
