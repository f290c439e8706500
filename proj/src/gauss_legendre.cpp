#include "splinequad/gauss_legendre.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace splinequad {

namespace {

// P_q(x) and P_q'(x) by the three-term recurrence.
std::pair<double, double> legendre(int q, double x) {
  double p0 = 1.0, p1 = x;
  if (q == 0) return {1.0, 0.0};
  for (int k = 2; k <= q; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, q * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

ElementRule legendre_rule(int q) {
  if (q < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  ElementRule rule;
  rule.order = q;
  rule.nodes.assign(q, 0.0);
  rule.weights.assign(q, 0.0);
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      // Newton may cycle at the last ulp; accept if the polynomial vanishes to rounding.
      const auto [p, dp] = legendre(q, x);
      if (std::abs(p) > 64 * 2.3e-16 * std::abs(dp)) {
        throw std::runtime_error("Legendre root iteration did not converge");
      }
    }
    if (q % 2 == 1 && i == half - 1) x = 0.0;
    const auto [p, dp] = legendre(q, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[q - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = rule.weights[q - 1 - i] = w;
  }
  return rule;
}

QuadratureRule element_gauss_rule(const KnotVector& knots, int q) {
  const auto ref = legendre_rule(q);
  const auto& br = knots.breaks();
  QuadratureRule rule;
  rule.interval = Interval{knots.front(), knots.back()};
  for (std::size_t e = 0; e + 1 < br.size(); ++e) {
    const double half = 0.5 * (br[e + 1] - br[e]);
    const double mid = 0.5 * (br[e + 1] + br[e]);
    for (int k = 0; k < q; ++k) {
      rule.nodes.push_back(mid + half * ref.nodes[k]);
      rule.weights.push_back(half * ref.weights[k]);
    }
  }
  return rule;
}

QuadratureRule source_rule(const SplineSpace& source) {
  const int d = source.degree();
  if (d % 2 == 0) throw std::invalid_argument("source rule needs odd degree");
  for (int m : source.knots().mults()) {
    if (m != d + 1) {
      throw std::invalid_argument("source space must be discontinuous at every knot");
    }
  }
  auto rule = element_gauss_rule(source.knots(), (d + 1) / 2);
  rule.describe(source);
  return rule;
}

}  // namespace splinequad
