#include "splinequad/basis.hpp"

#include <algorithm>
#include <stdexcept>

#include "splinequad/gauss_legendre.hpp"

namespace splinequad {

BasisEvaluation eval(const SplineSpace& space, double u) {
  const auto& T = space.expanded_knots();
  const int d = space.degree();
  const int K = static_cast<int>(T.size());
  const int n = K - d - 1;
  if (!(u >= T[d] && u <= T.back())) {
    throw std::out_of_range("evaluation point outside the knot span");
  }
  // Knots past the end repeat the last one; the phantom functions they
  // create are zeroed below.
  auto knot = [&](int i) { return i < K ? T[i] : T.back(); };

  const bool left_limit = u == space.domain().b || u == T.back();
  int mu = left_limit
               ? static_cast<int>(std::lower_bound(T.begin(), T.end(), u) - T.begin()) - 1
               : static_cast<int>(std::upper_bound(T.begin(), T.end(), u) - T.begin()) - 1;
  mu = std::clamp(mu, d, K - 2);

  BasisEvaluation out;
  out.first_index = mu - d;
  out.values.assign(d + 1, 0.0);
  out.derivatives.assign(d + 1, 0.0);

  std::vector<double> N(d + 1, 0.0), lower(d, 0.0), left(d + 1), right(d + 1);
  N[0] = 1.0;
  for (int j = 1; j <= d; ++j) {
    if (j == d) std::copy(N.begin(), N.begin() + d, lower.begin());
    left[j] = u - knot(mu + 1 - j);
    right[j] = knot(mu + j) - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  out.values = N;

  if (d > 0) {
    for (int k = 0; k <= d; ++k) {
      const int j = mu - d + k;
      double dv = 0.0;
      if (k >= 1) {
        const double den = knot(j + d) - knot(j);
        if (den > 0.0) dv += lower[k - 1] / den;
      }
      if (k <= d - 1) {
        const double den = knot(j + d + 1) - knot(j + 1);
        if (den > 0.0) dv -= lower[k] / den;
      }
      out.derivatives[k] = d * dv;
    }
  }
  for (int k = 0; k <= d; ++k) {
    if (out.first_index + k >= n) {
      out.values[k] = 0.0;
      out.derivatives[k] = 0.0;
    }
  }
  return out;
}

double integral(const SplineSpace& space, int i) {
  const auto& T = space.expanded_knots();
  const int d = space.degree();
  if (i < 0 || i >= space.dimension()) {
    throw std::out_of_range("basis index out of range");
  }
  return (T[i + d + 1] - T[i]) / (d + 1);
}

double domain_integral(const SplineSpace& space, int i) {
  const auto& T = space.expanded_knots();
  const int d = space.degree();
  const auto& dom = space.domain();
  if (i < 0 || i >= space.dimension()) {
    throw std::out_of_range("basis index out of range");
  }
  const double lo = std::max(T[i], dom.a);
  const double hi = std::min(T[i + d + 1], dom.b);
  if (!(hi > lo)) return 0.0;
  if (lo == T[i] && hi == T[i + d + 1]) return integral(space, i);

  // Piecewise polynomial of degree d: a (d/2+1)-point rule per knot span is exact.
  const auto rule = legendre_rule(d / 2 + 1);
  double sum = 0.0;
  for (int k = i; k <= i + d; ++k) {
    const double x0 = std::max(T[k], lo);
    const double x1 = std::min(T[k + 1], hi);
    if (!(x1 > x0)) continue;
    const double half = 0.5 * (x1 - x0);
    const double mid = 0.5 * (x1 + x0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const auto ev = eval(space, mid + half * rule.nodes[q]);
      const int off = i - ev.first_index;
      if (off >= 0 && off <= d) sum += half * rule.weights[q] * ev.values[off];
    }
  }
  return sum;
}

std::vector<double> domain_integrals(const SplineSpace& space) {
  std::vector<double> out(space.dimension());
  for (int i = 0; i < space.dimension(); ++i) out[i] = domain_integral(space, i);
  return out;
}

double eval_spline(const SplineSpace& space, std::span<const double> coeffs,
                   double u) {
  if (static_cast<int>(coeffs.size()) != space.dimension()) {
    throw std::invalid_argument("coefficient count does not match the dimension");
  }
  const auto ev = eval(space, u);
  double s = 0.0;
  for (std::size_t k = 0; k < ev.values.size(); ++k) {
    const int idx = ev.first_index + static_cast<int>(k);
    if (idx < space.dimension()) s += coeffs[idx] * ev.values[k];
  }
  return s;
}

BSplinePoint single_bspline(std::span<const double> knots, double u) {
  const int p = static_cast<int>(knots.size()) - 2;
  if (p < 0) throw std::invalid_argument("a B-spline needs at least two knots");
  if (!(u >= knots.front() && u < knots.back())) return {};

  // N[k] holds the degree-q B-spline on knots[k..k+q+1].
  std::vector<double> N(p + 1, 0.0);
  for (int k = 0; k <= p; ++k) {
    N[k] = (knots[k] <= u && u < knots[k + 1]) ? 1.0 : 0.0;
  }
  std::vector<double> lower;
  for (int q = 1; q <= p; ++q) {
    if (q == p) lower = N;
    for (int k = 0; k + q <= p; ++k) {
      double v = 0.0;
      const double d0 = knots[k + q] - knots[k];
      const double d1 = knots[k + q + 1] - knots[k + 1];
      if (d0 > 0.0) v += (u - knots[k]) / d0 * N[k];
      if (d1 > 0.0) v += (knots[k + q + 1] - u) / d1 * N[k + 1];
      N[k] = v;
    }
  }
  BSplinePoint out{N[0], 0.0};
  if (p > 0) {
    const double d0 = knots[p] - knots[0];
    const double d1 = knots[p + 1] - knots[1];
    double dv = 0.0;
    if (d0 > 0.0) dv += lower[0] / d0;
    if (d1 > 0.0) dv -= lower[1] / d1;
    out.derivative = p * dv;
  }
  return out;
}

}  // namespace splinequad
