#include "splinequad/galerkin.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "splinequad/basis.hpp"
#include "splinequad/gauss_legendre.hpp"

namespace splinequad {

void DiscretizationSpec::validate() const {
  if (p < 1) throw std::invalid_argument("trial degree must be at least 1");
  if (k < 0 || k > p - 1) throw std::invalid_argument("trial continuity must lie in [0, p-1]");
  if (l < 0 || l > p) throw std::invalid_argument("derivative order must lie in [0, p]");
  if (k - l < -1) throw std::invalid_argument("k - l must be at least -1");
}

std::pair<int, int> rule_space(const DiscretizationSpec& spec) {
  return {2 * spec.p + 1, spec.k - spec.l};
}

namespace {

SplineSpace on_breaks(const KnotVector& mesh, int degree, int interior) {
  std::vector<int> mults(mesh.breaks().size(), interior);
  mults.front() = mults.back() = degree + 1;
  return SplineSpace(degree, KnotVector(mesh.breaks(), std::move(mults)));
}

}  // namespace

SplineSpace trial_space(const DiscretizationSpec& spec, const KnotVector& mesh) {
  spec.validate();
  return on_breaks(mesh, spec.p, spec.p - spec.k);
}

SplineSpace integrand_space(const DiscretizationSpec& spec, const KnotVector& mesh) {
  spec.validate();
  const auto [d, c] = rule_space(spec);
  return on_breaks(mesh, d, d - c);
}

QuadratureRule classical_rule(const DiscretizationSpec& spec, const KnotVector& mesh) {
  spec.validate();
  auto rule = element_gauss_rule(mesh, spec.p + 1);
  rule.describe(trial_space(spec, mesh));
  return rule;
}

QuadratureRule optimal_rule(const DiscretizationSpec& spec, const KnotVector& mesh,
                            const TraceConfig& cfg) {
  const auto res = trace(integrand_space(spec, mesh), cfg);
  if (res.status != TraceStatus::Converged) {
    throw std::runtime_error("optimal rule did not converge: " + res.message);
  }
  return res.rule;
}

Matrices assemble(const DiscretizationSpec& spec, const KnotVector& mesh,
                  const QuadratureRule& rule) {
  const SplineSpace V = trial_space(spec, mesh);
  const Interval dom = V.domain();
  const double tol = 1e-12 * dom.length();
  if (std::abs(rule.interval.a - dom.a) > tol || std::abs(rule.interval.b - dom.b) > tol) {
    throw std::invalid_argument("rule interval does not match the mesh");
  }
  const int n = V.dimension();
  Matrices out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    if (!dom.contains(rule.nodes[q])) {
      throw std::invalid_argument("rule node outside the mesh");
    }
    const auto ev = eval(V, rule.nodes[q]);
    const double w = rule.weights[q];
    const int f = ev.first_index;
    const int cnt = static_cast<int>(ev.values.size());
    for (int a = 0; a < cnt && f + a < n; ++a) {
      for (int b = a; b < cnt && f + b < n; ++b) {
        out.mass(f + a, f + b) += w * ev.values[a] * ev.values[b];
        out.stiffness(f + a, f + b) += w * ev.derivatives[a] * ev.derivatives[b];
      }
    }
  }
  out.mass.triangularView<Eigen::StrictlyLower>() = out.mass.transpose();
  out.stiffness.triangularView<Eigen::StrictlyLower>() = out.stiffness.transpose();
  return out;
}

double interior_nodes_per_element(const QuadratureRule& rule, const KnotVector& mesh) {
  const auto& br = mesh.breaks();
  const int N = mesh.elements();
  const int e0 = N / 4, e1 = N - N / 4;
  // Shift the window by a quarter element so nodes on knots count once.
  auto shifted = [&](int e) {
    const double h = br[e + 1] - br[e];
    return br[e] - 0.25 * h;
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double lo = e0 == 0 ? -inf : shifted(e0);
  const double hi = e1 == N ? inf : shifted(e1);
  int count = 0;
  for (double x : rule.nodes) {
    if (x >= lo && x < hi) ++count;
  }
  return static_cast<double>(count) / (e1 - e0);
}

double relative_difference(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const double scale = B.cwiseAbs().maxCoeff();
  const double diff = (A - B).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

SavingsReport savings_report(const DiscretizationSpec& spec, const KnotVector& mesh,
                             const TraceConfig& cfg) {
  const auto classical = classical_rule(spec, mesh);
  const auto optimal = optimal_rule(spec, mesh, cfg);
  const auto Mc = assemble(spec, mesh, classical);
  const auto Mo = assemble(spec, mesh, optimal);
  SavingsReport r;
  r.elements = mesh.elements();
  r.classical_nodes = static_cast<int>(classical.size());
  r.optimal_nodes = static_cast<int>(optimal.size());
  r.classical_evaluations = static_cast<long>(r.classical_nodes) * (spec.p + 1);
  r.optimal_evaluations = static_cast<long>(r.optimal_nodes) * (spec.p + 1);
  r.classical_interior_per_element = interior_nodes_per_element(classical, mesh);
  r.optimal_interior_per_element = interior_nodes_per_element(optimal, mesh);
  r.mass_difference = relative_difference(Mo.mass, Mc.mass);
  r.stiffness_difference = relative_difference(Mo.stiffness, Mc.stiffness);
  return r;
}

std::string to_csv(const Eigen::MatrixXd& A) {
  std::string out;
  char buf[40];
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      if (j) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string to_triplets(const Eigen::MatrixXd& A) {
  std::string out;
  char buf[80];
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (A(i, j) == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(i),
                    static_cast<long>(j), A(i, j));
      out += buf;
    }
  }
  return out;
}

}  // namespace splinequad
