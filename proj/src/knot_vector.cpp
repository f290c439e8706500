#include "splinequad/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace splinequad {

KnotVector::KnotVector(std::vector<double> breaks, std::vector<int> mults)
    : breaks_(std::move(breaks)), mults_(std::move(mults)) {
  if (breaks_.size() < 2) {
    throw std::invalid_argument("knot vector needs at least two breakpoints");
  }
  if (breaks_.size() != mults_.size()) {
    throw std::invalid_argument("breaks and mults differ in length");
  }
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (!std::isfinite(breaks_[i])) {
      throw std::invalid_argument("non-finite breakpoint");
    }
    if (i > 0 && !(breaks_[i] > breaks_[i - 1])) {
      throw std::invalid_argument("breakpoints must be strictly increasing");
    }
    if (mults_[i] < 1) {
      throw std::invalid_argument("multiplicities must be positive");
    }
  }
}

KnotVector KnotVector::uniform(int degree, int continuity, int elements,
                               double a, double b) {
  if (elements < 1) throw std::invalid_argument("need at least one element");
  if (continuity < -1 || continuity >= degree) {
    throw std::invalid_argument("continuity must lie in [-1, degree-1]");
  }
  if (!(b > a)) throw std::invalid_argument("empty interval");
  std::vector<double> breaks(elements + 1);
  std::vector<int> mults(elements + 1, degree - continuity);
  for (int i = 0; i <= elements; ++i) {
    breaks[i] = a + (b - a) * i / elements;
  }
  breaks.back() = b;
  mults.front() = mults.back() = degree + 1;
  return KnotVector(std::move(breaks), std::move(mults));
}

KnotVector KnotVector::from_multiset(std::span<const double> sorted,
                                     double tol) {
  std::vector<double> breaks;
  std::vector<int> mults;
  for (double x : sorted) {
    if (!breaks.empty() && x < breaks.back()) {
      throw std::invalid_argument("knot multiset is not sorted");
    }
    if (!breaks.empty() && x - breaks.back() < tol) {
      ++mults.back();
    } else {
      breaks.push_back(x);
      mults.push_back(1);
    }
  }
  return KnotVector(std::move(breaks), std::move(mults));
}

int KnotVector::cardinality() const {
  return std::accumulate(mults_.begin(), mults_.end(), 0);
}

std::vector<double> KnotVector::expanded() const {
  std::vector<double> out;
  out.reserve(cardinality());
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    out.insert(out.end(), mults_[i], breaks_[i]);
  }
  return out;
}

SplineSpace::SplineSpace(int degree, KnotVector knots)
    : SplineSpace(degree, knots, Interval{knots.front(), knots.back()}) {}

SplineSpace::SplineSpace(int degree, KnotVector knots, Interval domain)
    : degree_(degree), knots_(std::move(knots)), domain_(domain) {
  if (degree_ < 0) throw std::invalid_argument("negative degree");
  for (int m : knots_.mults()) {
    if (m > degree_ + 1) {
      std::ostringstream msg;
      msg << "multiplicity " << m << " exceeds degree + 1 = " << degree_ + 1;
      throw std::invalid_argument(msg.str());
    }
  }
  if (!(domain_.b > domain_.a) || domain_.a < knots_.front() ||
      domain_.b > knots_.back()) {
    throw std::invalid_argument("domain must be a non-empty sub-interval of the knot span");
  }
  expanded_ = knots_.expanded();
  if (dimension() < 1) {
    throw std::invalid_argument("knot vector too short for the degree");
  }
}

int SplineSpace::dimension() const {
  return knots_.cardinality() - (degree_ + 1);
}

std::optional<int> SplineSpace::uniform_continuity() const {
  const auto& m = knots_.mults();
  if (m.size() < 3) return std::nullopt;
  for (std::size_t i = 2; i + 1 < m.size(); ++i) {
    if (m[i] != m[1]) return std::nullopt;
  }
  return degree_ - m[1];
}

bool SplineSpace::is_open() const {
  return knots_.mults().front() == degree_ + 1 &&
         knots_.mults().back() == degree_ + 1;
}

int dimension(const SplineSpace& space) { return space.dimension(); }

SplineSpace source_space(const SplineSpace& target) {
  const int d = target.degree();
  if (d % 2 == 0) {
    throw std::invalid_argument("optimal rules are built for odd degree only");
  }
  if (!target.is_open()) {
    throw std::invalid_argument("target knot vector must be open");
  }
  const int dim = target.dimension();
  if (dim % 2 != 0) {
    std::ostringstream msg;
    msg << "target dimension " << dim
        << " is odd: an optimal rule needs d + 1 + i = 2m";
    if (auto c = target.uniform_continuity(); c && *c % 2 == 0) {
      msg << " (even continuity " << *c << " requires an odd element count)";
    }
    throw ParityError(msg.str());
  }
  const int n = (dim + d) / (d + 1);  // ceil(dim / (d+1))
  const Interval dom{target.knots().front(), target.knots().back()};
  auto kv = KnotVector::uniform(d, -1, n, dom.a, dom.b);
  SplineSpace source(d, std::move(kv));
  if (redundancy(source, target) % 2 != 0) {
    throw ParityError("odd redundancy between source and target");
  }
  return source;
}

int redundancy(const SplineSpace& source, const SplineSpace& target) {
  return source.dimension() - target.dimension();
}

KnotPath::KnotPath(std::vector<double> source, std::vector<double> target,
                   Interval domain, double exterior)
    : source_(std::move(source)),
      target_(std::move(target)),
      domain_(domain),
      exterior_(exterior) {
  if (source_.size() != target_.size()) {
    throw std::logic_error("knot path endpoints differ in cardinality");
  }
  if (!std::is_sorted(source_.begin(), source_.end()) ||
      !std::is_sorted(target_.begin(), target_.end())) {
    throw std::logic_error("knot path endpoints must be sorted");
  }
}

std::vector<double> KnotPath::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("knot path time outside [0,1]");
  }
  std::vector<double> out(source_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = t == 1.0 ? target_[i] : source_[i] + t * (target_[i] - source_[i]);
  }
  return out;
}

KnotPath knot_path(const SplineSpace& source, const SplineSpace& target) {
  const int r = redundancy(source, target);
  const Interval dom{target.knots().front(), target.knots().back()};
  const double exterior = dom.b + dom.length() / target.knots().elements();
  auto tgt = target.expanded_knots();
  tgt.insert(tgt.end(), r, exterior);
  return KnotPath(source.expanded_knots(), std::move(tgt), dom, exterior);
}

SplineSpace space_at(const KnotPath& path, double t, int degree) {
  const auto knots = path.at(t);
  const double tol = 1e-12 * path.domain().length();
  auto kv = KnotVector::from_multiset(knots, tol);
  for (int m : kv.mults()) {
    if (m > degree + 1) {
      throw std::runtime_error("knot path collapsed beyond degree + 1");
    }
  }
  return SplineSpace(degree, std::move(kv), path.domain());
}

void to_json(nlohmann::json& j, const KnotVector& kv) {
  j = nlohmann::json{{"breaks", kv.breaks()}, {"mults", kv.mults()}};
}

KnotVector knot_vector_from_json(const nlohmann::json& j) {
  return KnotVector(j.at("breaks").get<std::vector<double>>(),
                    j.at("mults").get<std::vector<int>>());
}

nlohmann::json space_to_json(const SplineSpace& space) {
  nlohmann::json j = space.knots();
  j["degree"] = space.degree();
  return j;
}

SplineSpace space_from_json(const nlohmann::json& j) {
  return SplineSpace(j.at("degree").get<int>(), knot_vector_from_json(j));
}

}  // namespace splinequad
