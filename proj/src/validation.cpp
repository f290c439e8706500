#include "splinequad/validation.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "splinequad/basis.hpp"

namespace splinequad {

ValidationReport validate_rule(const SplineSpace& space, const QuadratureRule& rule,
                               double tol, int samples, std::uint64_t seed) {
  ValidationReport rep;
  const Interval dom = space.domain();
  const double L = dom.length();
  if (rule.nodes.size() != rule.weights.size()) {
    rep.reason = "nodes and weights differ in length";
    return rep;
  }
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    if (!dom.contains(rule.nodes[j])) {
      rep.reason = "node outside the interval";
      return rep;
    }
  }

  const int n = space.dimension();
  const auto I = domain_integrals(space);
  std::vector<double> Q(n, 0.0);
  std::vector<BasisEvaluation> evals;
  evals.reserve(rule.nodes.size());
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    evals.push_back(eval(space, rule.nodes[j]));
    const auto& ev = evals.back();
    for (std::size_t k = 0; k < ev.values.size(); ++k) {
      const int i = ev.first_index + static_cast<int>(k);
      if (i < n) Q[i] += rule.weights[j] * ev.values[k];
    }
  }
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = Q[i] - I[i];
    sq += e * e;
    if (std::abs(e) > rep.max_basis_error || rep.worst_basis < 0) {
      rep.max_basis_error = std::abs(e);
      rep.worst_basis = i;
    }
  }
  rep.residual_norm = std::sqrt(sq) / n;

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coef(0.0, 0.5);
  std::vector<double> c(n);
  for (int s = 0; s < samples; ++s) {
    double exact = 0.0, norm = 0.0;
    for (int i = 0; i < n; ++i) {
      c[i] = coef(gen);
      exact += c[i] * I[i];
      norm += c[i] * c[i];
    }
    double q = 0.0;
    for (std::size_t j = 0; j < evals.size(); ++j) {
      const auto& ev = evals[j];
      double f = 0.0;
      for (std::size_t k = 0; k < ev.values.size(); ++k) {
        const int i = ev.first_index + static_cast<int>(k);
        if (i < n) f += c[i] * ev.values[k];
      }
      q += rule.weights[j] * f;
    }
    const double err = std::abs(q - exact);
    rep.max_random_error = std::max(rep.max_random_error, err);
    rep.max_random_relative = std::max(rep.max_random_relative, err / (std::sqrt(norm) * L));
  }
  rep.samples = samples;

  if (!(rep.max_basis_error <= tol * L)) {
    std::ostringstream msg;
    msg << "basis function " << rep.worst_basis << " integrated with error "
        << rep.max_basis_error;
    rep.reason = msg.str();
  } else if (!(rep.max_random_relative <= tol)) {
    rep.reason = "random spline error above tolerance";
  } else {
    rep.passed = true;
  }
  return rep;
}

nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json j{{"passed", r.passed},
                   {"residual_norm", r.residual_norm},
                   {"max_basis_error", r.max_basis_error},
                   {"worst_basis", r.worst_basis},
                   {"samples", r.samples},
                   {"max_random_error", r.max_random_error},
                   {"max_random_relative", r.max_random_relative}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

}  // namespace splinequad
