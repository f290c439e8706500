#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "splinequad/knot_vector.hpp"
#include "splinequad/quadrature_rule.hpp"

namespace splinequad {

struct TraceConfig {
  double initial_step = 1e-2;
  double min_step = 1e-10;
  double max_step = 5e-2;
  double newton_tol = 1e-14;  // on the normalized residual, per unit of b-a
  int newton_max_iters = 25;
  double shrink = 0.5;
  double grow = 1.5;
  int grow_below_iters = 4;
  double limit_weight_threshold = 1e-10;
  double end_zone = 1e-3;
  /// Bound on |Q[D_i] - I[D_i]| / (b-a) for accepting the final rule.
  double acceptance_tol = 1e-12;

  /// Throws std::invalid_argument when the fields are inconsistent.
  void validate() const;
};

enum class NewtonFailure { Singular, IterationCap, LeftDomain };
std::string to_string(NewtonFailure f);

struct NewtonResult {
  std::optional<QuadratureRule> rule;
  NewtonFailure failure = NewtonFailure::IterationCap;
  int iterations = 0;

  explicit operator bool() const { return rule.has_value(); }
};

enum class TraceStatus { Converged, Stalled };
std::string to_string(TraceStatus s);

struct TraceResult {
  QuadratureRule rule;
  int steps_taken = 0;
  int newton_failures = 0;
  double t_reached = 0.0;
  TraceStatus status = TraceStatus::Stalled;
  std::string message;
  /// Trailing nodes and weights of the full system removed at the limit.
  std::vector<double> dropped_nodes;
  std::vector<double> dropped_weights;
};

/// F_i = sum_j w_j D_i(tau_j) - integral of D_i over the domain.
Eigen::VectorXd residual(const SplineSpace& space, const QuadratureRule& rule);

/// Columns: d/dtau_1..d/dtau_m, then d/dw_1..d/dw_m.
Eigen::MatrixXd jacobian(const SplineSpace& space, const QuadratureRule& rule);

/// |F| / (2m).
double residual_norm(const SplineSpace& space, const QuadratureRule& rule);

/// Damped Newton iteration on the exactness system of `space`. With `polish`
/// the iteration continues past the tolerance while the update keeps shrinking.
NewtonResult newton_correct(const SplineSpace& space, const QuadratureRule& guess,
                            const TraceConfig& cfg, bool polish = false);

/// Drops the trailing r/2 nodes of a rule traced towards the target and
/// solves the reduced system on the target space.
NewtonResult finalize_limit(const SplineSpace& target, const QuadratureRule& rule,
                            int r, const TraceConfig& cfg);

/// Empty when the rule is an acceptable optimal rule for `space`, otherwise
/// the reason it is not.
std::optional<std::string> check_rule(const SplineSpace& space,
                                      const QuadratureRule& rule,
                                      const TraceConfig& cfg);

/// Follows the root from the per-element Gauss rule of source_space(target)
/// to the optimal rule of target.
TraceResult trace(const SplineSpace& target, const TraceConfig& cfg = {});

}  // namespace splinequad
