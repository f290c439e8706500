#pragma once

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "splinequad/continuation.hpp"
#include "splinequad/knot_vector.hpp"
#include "splinequad/quadrature_rule.hpp"

namespace splinequad {

/// Trial degree p, trial continuity k, derivative order l of the weak form.
struct DiscretizationSpec {
  int p = 1;
  int k = 0;
  int l = 0;

  void validate() const;
};

/// (2p+1, k-l): the smallest odd-degree space holding every integrand.
std::pair<int, int> rule_space(const DiscretizationSpec& spec);

/// Degree p splines on the mesh breaks, interior multiplicity p-k.
SplineSpace trial_space(const DiscretizationSpec& spec, const KnotVector& mesh);

/// Degree 2p+1 splines of continuity k-l on the mesh breaks.
SplineSpace integrand_space(const DiscretizationSpec& spec, const KnotVector& mesh);

/// Per-element (p+1)-point Gauss rule.
QuadratureRule classical_rule(const DiscretizationSpec& spec, const KnotVector& mesh);

/// Optimal rule for integrand_space, by trace().
QuadratureRule optimal_rule(const DiscretizationSpec& spec, const KnotVector& mesh,
                            const TraceConfig& cfg = {});

struct Matrices {
  Eigen::MatrixXd mass;       // Q[N_i N_j]
  Eigen::MatrixXd stiffness;  // Q[N_i' N_j']
};

Matrices assemble(const DiscretizationSpec& spec, const KnotVector& mesh,
                  const QuadratureRule& rule);

struct SavingsReport {
  int elements = 0;
  int classical_nodes = 0;
  int optimal_nodes = 0;
  long classical_evaluations = 0;
  long optimal_evaluations = 0;
  double classical_interior_per_element = 0.0;
  double optimal_interior_per_element = 0.0;
  double mass_difference = 0.0;       // relative, max norm
  double stiffness_difference = 0.0;  // relative, max norm
};

SavingsReport savings_report(const DiscretizationSpec& spec, const KnotVector& mesh,
                             const TraceConfig& cfg = {});

/// Average node count per element over the middle half of the mesh.
double interior_nodes_per_element(const QuadratureRule& rule, const KnotVector& mesh);

/// max|A - B| / max|B|.
double relative_difference(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

std::string to_csv(const Eigen::MatrixXd& A);
/// "i j value" per nonzero entry, zero-based.
std::string to_triplets(const Eigen::MatrixXd& A);

}  // namespace splinequad
