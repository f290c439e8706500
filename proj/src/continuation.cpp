#include "splinequad/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "splinequad/basis.hpp"
#include "splinequad/gauss_legendre.hpp"

namespace splinequad {

void TraceConfig::validate() const {
  if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step &&
        max_step < 1.0)) {
    throw std::invalid_argument("step sizes must satisfy 0 < min <= initial <= max < 1");
  }
  if (!(newton_tol > 0.0 && acceptance_tol > 0.0 && limit_weight_threshold > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (newton_max_iters < 1) throw std::invalid_argument("newton_max_iters must be positive");
  if (!(shrink > 0.0 && shrink < 1.0) || !(grow >= 1.0)) {
    throw std::invalid_argument("shrink must lie in (0,1) and grow must be at least 1");
  }
  if (!(end_zone > 0.0 && end_zone < 1.0)) {
    throw std::invalid_argument("end_zone must lie in (0,1)");
  }
}

std::string to_string(NewtonFailure f) {
  switch (f) {
    case NewtonFailure::Singular: return "singular";
    case NewtonFailure::IterationCap: return "iteration_cap";
    case NewtonFailure::LeftDomain: return "left_domain";
  }
  return "unknown";
}

std::string to_string(TraceStatus s) {
  return s == TraceStatus::Converged ? "converged" : "stalled";
}

namespace {

struct System {
  const SplineSpace& space;
  std::vector<double> integrals;

  explicit System(const SplineSpace& s) : space(s), integrals(domain_integrals(s)) {}

  int equations() const { return space.dimension(); }

  void check(const QuadratureRule& rule) const {
    if (rule.weights.size() != rule.nodes.size() ||
        2 * static_cast<int>(rule.nodes.size()) != equations()) {
      std::ostringstream msg;
      msg << "rule with " << rule.nodes.size() << " nodes does not match a space of dimension "
          << equations();
      throw std::invalid_argument(msg.str());
    }
  }

  Eigen::VectorXd residual(const QuadratureRule& rule) const {
    const int n = equations();
    Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const auto ev = eval(space, rule.nodes[j]);
      for (std::size_t k = 0; k < ev.values.size(); ++k) {
        const int i = ev.first_index + static_cast<int>(k);
        if (i < n) F[i] += rule.weights[j] * ev.values[k];
      }
    }
    for (int i = 0; i < n; ++i) F[i] -= integrals[i];
    return F;
  }

  Eigen::MatrixXd jacobian(const QuadratureRule& rule) const {
    const int n = equations();
    const int m = static_cast<int>(rule.nodes.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, 2 * m);
    for (int j = 0; j < m; ++j) {
      const auto ev = eval(space, rule.nodes[j]);
      for (std::size_t k = 0; k < ev.values.size(); ++k) {
        const int i = ev.first_index + static_cast<int>(k);
        if (i >= n) continue;
        J(i, j) = rule.weights[j] * ev.derivatives[k];
        J(i, m + j) = ev.values[k];
      }
    }
    return J;
  }
};

bool in_omega(const QuadratureRule& rule, const Interval& dom) {
  const double L = dom.length();
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double x = rule.nodes[j];
    const double w = rule.weights[j];
    if (!(x >= dom.a && x <= dom.b)) return false;
    if (j > 0 && !(x > rule.nodes[j - 1])) return false;
    if (!(w > 0.0 && w <= L)) return false;
  }
  return true;
}

QuadratureRule shifted(const QuadratureRule& rule, const Eigen::VectorXd& dx, double lambda) {
  QuadratureRule out = rule;
  const std::size_t m = rule.nodes.size();
  for (std::size_t j = 0; j < m; ++j) {
    out.nodes[j] += lambda * dx[j];
    out.weights[j] += lambda * dx[m + j];
  }
  return out;
}

// Newton update; empty when the matrix is numerically singular. Rows and
// columns are equilibrated first: near the end of a path the vanishing
// nodes and the basis functions leaving the interval give rows and columns
// of very different scale that are not a rank drop.
std::optional<Eigen::VectorXd> newton_step(const Eigen::MatrixXd& J,
                                           const Eigen::VectorXd& F) {
  const Eigen::Index n = J.cols();
  Eigen::VectorXd rows(n), cols(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = J.row(i).cwiseAbs().maxCoeff();
    if (!(s > 0.0)) return std::nullopt;
    rows[i] = 1.0 / s;
  }
  const Eigen::MatrixXd Jr = rows.asDiagonal() * J;
  for (Eigen::Index c = 0; c < n; ++c) {
    const double s = Jr.col(c).cwiseAbs().maxCoeff();
    if (!(s > 0.0)) return std::nullopt;
    cols[c] = 1.0 / s;
  }
  const Eigen::MatrixXd Js = Jr * cols.asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Js);
  const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(pivot >= 1e-14 * Js.cwiseAbs().maxCoeff())) return std::nullopt;
  Eigen::VectorXd dx = lu.solve(-(rows.asDiagonal() * F));
  return dx.cwiseProduct(cols);
}

double normalized(const Eigen::VectorXd& F) {
  return F.norm() / static_cast<double>(F.size());
}

}  // namespace

Eigen::VectorXd residual(const SplineSpace& space, const QuadratureRule& rule) {
  System sys(space);
  sys.check(rule);
  return sys.residual(rule);
}

Eigen::MatrixXd jacobian(const SplineSpace& space, const QuadratureRule& rule) {
  System sys(space);
  sys.check(rule);
  return sys.jacobian(rule);
}

double residual_norm(const SplineSpace& space, const QuadratureRule& rule) {
  return normalized(residual(space, rule));
}

NewtonResult newton_correct(const SplineSpace& space, const QuadratureRule& guess,
                            const TraceConfig& cfg, bool polish) {
  System sys(space);
  sys.check(guess);
  const Interval& dom = space.domain();
  const double tol = cfg.newton_tol * dom.length();
  NewtonResult out;
  if (!in_omega(guess, dom)) {
    out.failure = NewtonFailure::LeftDomain;
    return out;
  }

  QuadratureRule x = guess;
  Eigen::VectorXd F = sys.residual(x);
  int it = 0;
  while (normalized(F) > tol) {
    if (it == cfg.newton_max_iters) {
      out.failure = NewtonFailure::IterationCap;
      out.iterations = it;
      return out;
    }
    const auto dx = newton_step(sys.jacobian(x), F);
    if (!dx) {
      out.failure = NewtonFailure::Singular;
      out.iterations = it;
      return out;
    }
    double lambda = 1.0;
    int halvings = 0;
    QuadratureRule next = shifted(x, *dx, lambda);
    while (!in_omega(next, dom)) {
      if (++halvings > 10) {
        out.failure = NewtonFailure::LeftDomain;
        out.iterations = it;
        return out;
      }
      lambda *= 0.5;
      next = shifted(x, *dx, lambda);
    }
    x = std::move(next);
    F = sys.residual(x);
    ++it;
  }

  if (polish) {
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 6; ++k) {
      const auto dx = newton_step(sys.jacobian(x), F);
      if (!dx) break;
      const double size = dx->norm();
      if (!(size < last) || size == 0.0) break;
      last = size;
      QuadratureRule next = shifted(x, *dx, 1.0);
      if (!in_omega(next, dom)) break;
      Eigen::VectorXd Fn = sys.residual(next);
      if (Fn.norm() > F.norm()) break;
      x = std::move(next);
      F = std::move(Fn);
    }
  }

  x.interval = dom;
  x.residual_norm = normalized(F);
  out.rule = std::move(x);
  out.iterations = it;
  return out;
}

NewtonResult finalize_limit(const SplineSpace& target, const QuadratureRule& rule,
                            int r, const TraceConfig& cfg) {
  if (r < 0 || r % 2 != 0) throw std::invalid_argument("redundancy must be even and non-negative");
  if (r == 0) return newton_correct(target, rule, cfg, true);
  const std::size_t drop = static_cast<std::size_t>(r / 2);
  if (rule.nodes.size() <= drop) throw std::invalid_argument("rule too short to reduce");
  const double b = target.domain().b;
  const double thr = cfg.limit_weight_threshold;
  for (std::size_t j = rule.nodes.size() - drop; j < rule.nodes.size(); ++j) {
    const bool degenerate = rule.weights[j] < thr * target.domain().length() ||
                            b - rule.nodes[j] < thr * target.domain().length();
    if (!degenerate) {
      NewtonResult out;
      out.failure = NewtonFailure::LeftDomain;
      return out;
    }
  }
  QuadratureRule reduced = rule;
  reduced.nodes.resize(rule.nodes.size() - drop);
  reduced.weights.resize(rule.weights.size() - drop);
  return newton_correct(target, reduced, cfg, true);
}

std::optional<std::string> check_rule(const SplineSpace& space, const QuadratureRule& rule,
                                      const TraceConfig& cfg) {
  const Interval& dom = space.domain();
  if (2 * static_cast<int>(rule.nodes.size()) != space.dimension() ||
      rule.weights.size() != rule.nodes.size()) {
    return "node count is not half the dimension";
  }
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    if (!dom.contains(rule.nodes[j])) return "node outside the interval";
    if (j > 0 && !(rule.nodes[j] > rule.nodes[j - 1])) return "nodes not strictly ascending";
    if (!(rule.weights[j] > 0.0)) return "non-positive weight";
  }
  const auto F = residual(space, rule);
  const double worst = F.cwiseAbs().maxCoeff();
  if (!(worst <= cfg.acceptance_tol * dom.length())) {
    std::ostringstream msg;
    msg << "exactness defect " << worst << " exceeds tolerance";
    return msg.str();
  }
  return std::nullopt;
}

TraceResult trace(const SplineSpace& target, const TraceConfig& cfg) {
  cfg.validate();
  const int d = target.degree();
  const SplineSpace source = source_space(target);
  const int r = redundancy(source, target);
  const KnotPath path = knot_path(source, target);

  TraceResult result;
  QuadratureRule x = source_rule(source);
  x.residual_norm = residual_norm(source, x);
  double t = 0.0;
  double h = cfg.initial_step;
  std::optional<std::pair<double, QuadratureRule>> prev;

  auto finish = [&](QuadratureRule rule, double t_reached) {
    rule.describe(target);
    rule.interval = target.domain();
    rule.residual_norm = residual_norm(target, rule);
    rule.trace = TraceStats{result.steps_taken, result.newton_failures, t_reached};
    result.t_reached = t_reached;
    if (auto why = check_rule(target, rule, cfg)) {
      result.status = TraceStatus::Stalled;
      result.message = *why;
    } else {
      result.status = TraceStatus::Converged;
    }
    result.rule = std::move(rule);
    return result;
  };

  auto stall = [&](std::string why) {
    QuadratureRule partial = x;
    partial.describe(target);
    partial.trace = TraceStats{result.steps_taken, result.newton_failures, t};
    result.rule = std::move(partial);
    result.t_reached = t;
    result.status = TraceStatus::Stalled;
    result.message = std::move(why);
    return result;
  };

  auto try_limit = [&]() -> std::optional<QuadratureRule> {
    auto fin = finalize_limit(target, x, r, cfg);
    if (!fin) return std::nullopt;
    const auto keep = x.nodes.size() - static_cast<std::size_t>(r / 2);
    result.dropped_nodes.assign(x.nodes.begin() + keep, x.nodes.end());
    result.dropped_weights.assign(x.weights.begin() + keep, x.weights.end());
    return std::move(*fin.rule);
  };

  while (true) {
    if (r == 0 && t >= 1.0) {
      auto fin = newton_correct(target, x, cfg, true);
      return finish(fin ? std::move(*fin.rule) : x, 1.0);
    }
    if (r > 0 && 1.0 - t <= cfg.end_zone) {
      if (auto fin = try_limit()) return finish(std::move(*fin), 1.0);
      if (1.0 - t < cfg.min_step) return stall("limit system did not converge");
    }

    const double t_new = r > 0 ? std::min(t + h, t + 0.5 * (1.0 - t)) : std::min(t + h, 1.0);
    const SplineSpace space = (r == 0 && t_new >= 1.0) ? target : space_at(path, t_new, d);

    QuadratureRule guess = x;
    if (prev) {
      const double s = (t_new - t) / (t - prev->first);
      QuadratureRule secant = x;
      for (std::size_t j = 0; j < x.nodes.size(); ++j) {
        secant.nodes[j] += s * (x.nodes[j] - prev->second.nodes[j]);
        secant.weights[j] += s * (x.weights[j] - prev->second.weights[j]);
      }
      if (in_omega(secant, space.domain())) guess = std::move(secant);
    }

    auto res = newton_correct(space, guess, cfg);
    if (res) {
      prev.emplace(t, std::move(x));
      x = std::move(*res.rule);
      t = t_new;
      ++result.steps_taken;
      if (res.iterations <= cfg.grow_below_iters) h = std::min(h * cfg.grow, cfg.max_step);
      continue;
    }

    ++result.newton_failures;
    // finalize_limit rejects rules whose trailing weights have not yet vanished.
    if (r > 0) {
      if (auto fin = try_limit()) return finish(std::move(*fin), 1.0);
    }
    h *= cfg.shrink;
    if (h < cfg.min_step) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t << " (" << to_string(res.failure) << ")";
      return stall(msg.str());
    }
  }
}

}  // namespace splinequad
