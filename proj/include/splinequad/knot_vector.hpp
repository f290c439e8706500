#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace splinequad {

struct Interval {
  double a = 0.0;
  double b = 1.0;

  double length() const { return b - a; }
  bool contains(double x) const { return x >= a && x <= b; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Rejected because the optimal node count d + 1 + i = 2m has no integer solution.
class ParityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Breakpoints with one multiplicity per breakpoint.
class KnotVector {
 public:
  KnotVector(std::vector<double> breaks, std::vector<int> mults);

  /// Open knot vector on [a,b] with `elements` equal elements, end multiplicity
  /// degree+1 and interior multiplicity degree-continuity.
  static KnotVector uniform(int degree, int continuity, int elements, double a,
                            double b);

  /// Collapses a sorted knot multiset; neighbours closer than `tol` merge.
  static KnotVector from_multiset(std::span<const double> sorted, double tol);

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<int>& mults() const { return mults_; }
  int elements() const { return static_cast<int>(breaks_.size()) - 1; }
  int cardinality() const;
  double front() const { return breaks_.front(); }
  double back() const { return breaks_.back(); }

  std::vector<double> expanded() const;

  friend bool operator==(const KnotVector&, const KnotVector&) = default;

 private:
  std::vector<double> breaks_;
  std::vector<int> mults_;
};

/// Piecewise polynomials of a fixed degree over a knot vector.
///
/// The domain is where quadrature and integrals live. It defaults to the span
/// of the knot vector; intermediate spaces of a knot path carry knots beyond
/// the domain's right end.
class SplineSpace {
 public:
  SplineSpace(int degree, KnotVector knots);
  SplineSpace(int degree, KnotVector knots, Interval domain);

  int degree() const { return degree_; }
  const KnotVector& knots() const { return knots_; }
  const Interval& domain() const { return domain_; }
  const std::vector<double>& expanded_knots() const { return expanded_; }

  /// Number of B-splines, card - (degree + 1).
  int dimension() const;

  /// Continuity shared by all interior knots (-1 when discontinuous); empty
  /// when it varies or there are no interior knots.
  std::optional<int> uniform_continuity() const;
  bool is_open() const;

 private:
  int degree_;
  KnotVector knots_;
  Interval domain_;
  std::vector<double> expanded_;
};

int dimension(const SplineSpace& space);

/// The discontinuous space on n uniform elements of the target interval with
/// the smallest n such that n(d+1) >= dim(target). Throws ParityError when
/// dim(target) is odd (no optimal rule with dim = 2m exists).
SplineSpace source_space(const SplineSpace& target);

/// dim(source) - dim(target).
int redundancy(const SplineSpace& source, const SplineSpace& target);

/// Index-wise linear interpolation between the sorted source multiset and the
/// sorted target multiset augmented by r copies of b + (b-a)/N.
class KnotPath {
 public:
  KnotPath(std::vector<double> source, std::vector<double> target,
           Interval domain, double exterior);

  const std::vector<double>& source_multiset() const { return source_; }
  const std::vector<double>& target_multiset() const { return target_; }
  const Interval& domain() const { return domain_; }
  double exterior() const { return exterior_; }

  std::vector<double> at(double t) const;

 private:
  std::vector<double> source_;
  std::vector<double> target_;
  Interval domain_;
  double exterior_;
};

KnotPath knot_path(const SplineSpace& source, const SplineSpace& target);

/// Spline space over the path knots at time t with domain [a,b]. Knots within
/// 1e-12 (b-a) of each other merge into one breakpoint.
SplineSpace space_at(const KnotPath& path, double t, int degree);

void to_json(nlohmann::json& j, const KnotVector& kv);
KnotVector knot_vector_from_json(const nlohmann::json& j);

/// {degree, breaks, mults}
nlohmann::json space_to_json(const SplineSpace& space);
SplineSpace space_from_json(const nlohmann::json& j);

}  // namespace splinequad
