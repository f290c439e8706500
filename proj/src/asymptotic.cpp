#include "splinequad/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "splinequad/basis.hpp"

namespace splinequad {

std::vector<std::size_t> AsymptoticPattern::element_nodes(int e) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    if (offsets[j] >= e && offsets[j] < e + 1) out.push_back(j);
  }
  return out;
}

namespace {

int period_of(int d, int c) { return (d - c) % 2 == 0 ? 1 : 2; }

void check_pair(int d, int c) {
  if (d < 1 || d % 2 == 0) throw std::invalid_argument("asymptotic rules need odd degree");
  if (c < 0 || c > d - 1) throw std::invalid_argument("continuity must lie in [0, d-1]");
}

// Local knots of shape s shifted by p elements on the grid with interior
// multiplicity mu.
std::vector<double> shape_knots(int d, int mu, int s, int p) {
  std::vector<double> k(d + 2);
  const int g = s + mu * p;
  for (int i = 0; i <= d + 1; ++i) k[i] = std::floor(static_cast<double>(g + i) / mu);
  return k;
}

struct PeriodicSystem {
  int d, mu, P;
  std::vector<std::vector<double>> shapes;

  PeriodicSystem(int d_, int c) : d(d_), mu(d_ - c), P(period_of(d_, c)) {
    for (int p = 0; p < P; ++p) {
      for (int s = 0; s < mu; ++s) shapes.push_back(shape_knots(d, mu, s, p));
    }
  }

  // Residuals and, if requested, their derivatives with respect to
  // (offset_1..offset_M, weight_1..weight_M).
  Eigen::VectorXd eval(const std::vector<double>& off, const std::vector<double>& w,
                       Eigen::MatrixXd* J) const {
    const int n = static_cast<int>(shapes.size());
    const int M = static_cast<int>(off.size());
    Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
    if (J) *J = Eigen::MatrixXd::Zero(n, 2 * M);
    for (int i = 0; i < n; ++i) {
      const auto& k = shapes[i];
      const double lo = k.front(), hi = k.back();
      for (int j = 0; j < M; ++j) {
        const int k0 = static_cast<int>(std::floor((lo - off[j]) / P)) - 1;
        const int k1 = static_cast<int>(std::ceil((hi - off[j]) / P)) + 1;
        for (int q = k0; q <= k1; ++q) {
          const double x = off[j] + q * P;
          if (x < lo || x >= hi) continue;
          const auto b = single_bspline(k, x);
          F[i] += w[j] * b.value;
          if (J) {
            (*J)(i, j) += w[j] * b.derivative;
            (*J)(i, M + j) += b.value;
          }
        }
      }
      F[i] -= (hi - lo) / (d + 1);
    }
    return F;
  }
};

// Nodes as fixed positions or symmetric pairs about a centre; each carries
// its own weight parameter.
struct Ansatz {
  struct Term {
    double center;
    int y;  // parameter index of the half-distance, -1 for a single node
    int w;  // parameter index of the weight
  };
  std::vector<Term> terms;
  int params = 0;
  std::vector<double> guess;

  void add_single(double center, double weight) {
    terms.push_back({center, -1, params});
    guess.push_back(weight);
    ++params;
  }
  void add_pair(double center, double y, double weight) {
    terms.push_back({center, params, params + 1});
    guess.push_back(y);
    guess.push_back(weight);
    params += 2;
  }

  void expand(const Eigen::VectorXd& p, std::vector<double>& off, std::vector<double>& w,
              Eigen::MatrixXd* T) const {
    off.clear();
    w.clear();
    std::vector<std::pair<int, double>> ydep;
    std::vector<int> wdep;
    for (const auto& t : terms) {
      if (t.y < 0) {
        off.push_back(t.center);
        w.push_back(p[t.w]);
        ydep.push_back({-1, 0.0});
        wdep.push_back(t.w);
      } else {
        for (double sgn : {-1.0, 1.0}) {
          off.push_back(t.center + sgn * p[t.y]);
          w.push_back(p[t.w]);
          ydep.push_back({t.y, sgn});
          wdep.push_back(t.w);
        }
      }
    }
    if (T) {
      const int M = static_cast<int>(off.size());
      *T = Eigen::MatrixXd::Zero(2 * M, params);
      for (int j = 0; j < M; ++j) {
        if (ydep[j].first >= 0) (*T)(j, ydep[j].first) = ydep[j].second;
        (*T)(M + j, wdep[j]) = 1.0;
      }
    }
  }

  bool valid(const Eigen::VectorXd& p) const {
    std::vector<std::pair<double, double>> ys;  // (center, y)
    for (const auto& t : terms) {
      if (!(p[t.w] > 0.0)) return false;
      if (t.y >= 0) {
        if (!(p[t.y] > 0.0 && p[t.y] < 0.5)) return false;
        ys.push_back({t.center, p[t.y]});
      }
    }
    std::sort(ys.begin(), ys.end());
    for (std::size_t i = 1; i < ys.size(); ++i) {
      if (ys[i].first == ys[i - 1].first && !(ys[i].second - ys[i - 1].second > 1e-9)) {
        return false;
      }
    }
    return true;
  }
};

std::vector<Ansatz> candidates(int d, int c) {
  const int mu = d - c;
  std::vector<Ansatz> out;
  if (period_of(d, c) == 1) {
    const int k = mu / 2;
    // Fixed points of the reflections of one period: the knot and the midpoint.
    const std::vector<std::vector<double>> fixed_sets = {{0.0, 0.5}, {0.0}, {0.5}, {}};
    for (const auto& F : fixed_sets) {
      const int nf = static_cast<int>(F.size());
      if (nf > k || (k - nf) % 2 != 0) continue;
      const double theta = (nf == 1 && F[0] == 0.5) || nf == 0 ? 0.5 : 0.0;
      Ansatz a;
      for (double f : F) a.add_single(f, 1.0 / k);
      std::vector<double> ys;
      for (int j = 0; j < k; ++j) {
        const double pos = (j + theta) / k;
        if (pos > 1e-12 && pos < 0.5 - 1e-12) ys.push_back(0.5 - pos);
      }
      std::sort(ys.begin(), ys.end());
      for (double y : ys) a.add_pair(0.5, y, 1.0 / k);
      if (static_cast<int>(F.size() + 2 * ys.size()) == k) out.push_back(std::move(a));
    }
  } else {
    const int na = (mu + 1) / 2, nb = mu / 2;
    Ansatz a;
    for (auto [center, cnt] : {std::pair{0.5, na}, std::pair{1.5, nb}}) {
      if (cnt % 2 == 1) a.add_single(center, 1.0 / cnt);
      std::vector<double> ys;
      for (int j = 0; j < cnt; ++j) {
        const double pos = (j + 0.5) / cnt;
        if (pos < 0.5 - 1e-12) ys.push_back(0.5 - pos);
      }
      std::sort(ys.begin(), ys.end());
      for (double y : ys) a.add_pair(center, y, 1.0 / cnt);
    }
    out.push_back(std::move(a));
  }
  return out;
}

AsymptoticPattern make_pattern(int d, int c, std::vector<double> off, std::vector<double> w) {
  AsymptoticPattern p;
  p.degree = d;
  p.continuity = c;
  p.period = period_of(d, c);
  std::vector<std::size_t> idx(off.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (auto& x : off) x = x - p.period * std::floor(x / p.period);
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return off[i] < off[j]; });
  for (auto i : idx) {
    p.offsets.push_back(off[i]);
    p.weights.push_back(w[i]);
  }
  const auto F = pattern_residual(p);
  double s = 0.0;
  for (double f : F) s += f * f;
  p.residual_norm = std::sqrt(s) / static_cast<double>(F.size());
  return p;
}

std::optional<AsymptoticPattern> gauss_newton(int d, int c, const Ansatz& a) {
  const PeriodicSystem sys(d, c);
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(a.guess.data(), a.params);
  std::vector<double> off, w;
  Eigen::MatrixXd T, J;
  a.expand(p, off, w, &T);
  Eigen::VectorXd F = sys.eval(off, w, &J);
  for (int it = 0; it < 200; ++it) {
    if (F.cwiseAbs().maxCoeff() <= 1e-16) break;
    const Eigen::MatrixXd Jp = J * T;
    const Eigen::VectorXd step = Jp.colPivHouseholderQr().solve(-F);
    if (!step.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h, lambda *= 0.5) {
      const Eigen::VectorXd trial = p + lambda * step;
      if (!a.valid(trial)) continue;
      a.expand(trial, off, w, nullptr);
      const Eigen::VectorXd Ft = sys.eval(off, w, nullptr);
      if (Ft.norm() < F.norm()) {
        p = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    a.expand(p, off, w, &T);
    F = sys.eval(off, w, &J);
    if (lambda * step.norm() <= 1e-17) break;
  }
  if (!a.valid(p) || !(F.cwiseAbs().maxCoeff() <= 1e-14)) return std::nullopt;
  a.expand(p, off, w, nullptr);
  return make_pattern(d, c, off, w);
}

}  // namespace

std::vector<double> pattern_residual(const AsymptoticPattern& p) {
  const PeriodicSystem sys(p.degree, p.continuity);
  const auto F = sys.eval(p.offsets, p.weights, nullptr);
  return {F.data(), F.data() + F.size()};
}

std::vector<AsymptoticPattern> asymptotic_candidates(int d, int c) {
  check_pair(d, c);
  std::vector<AsymptoticPattern> out;
  for (const auto& a : candidates(d, c)) {
    if (auto p = gauss_newton(d, c, a)) out.push_back(std::move(*p));
  }
  return out;
}

AsymptoticPattern solve_asymptotic_system(int d, int c) {
  auto all = asymptotic_candidates(d, c);
  if (all.empty()) {
    std::ostringstream msg;
    msg << "no symmetric asymptotic rule found for d=" << d << ", c=" << c;
    throw std::runtime_error(msg.str());
  }
  if (all.size() == 1) return all.front();

  // Several exact periodic rules: keep the one finite rules converge to.
  constexpr int N = 31;
  const SplineSpace target(d, KnotVector::uniform(d, c, N, 0.0, N));
  const auto res = trace(target);
  if (res.status != TraceStatus::Converged) {
    throw std::runtime_error("cannot disambiguate asymptotic rules: " + res.message);
  }
  std::size_t best = 0;
  double best_dev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto dev = element_deviation(res.rule, N, all[i], N / 2);
    if (dev.node < best_dev) {
      best_dev = dev.node;
      best = i;
    }
  }
  return all[best];
}

AsymptoticPattern asymptotic_rule(int d, int c) {
  check_pair(d, c);
  // Nodes x of symmetric pairs are roots of quadratics in y = x(1-x).
  auto from_y = [](double y) { return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * y)); };
  if (d == 5 && c == 1) return make_pattern(d, c, {0.0, 0.5}, {7.0 / 15, 8.0 / 15});
  if (d == 5 && c == 3) return make_pattern(d, c, {0.5}, {1.0});
  if (d == 7 && c == 1) {
    const double d1 = (7.0 - std::sqrt(7.0)) / 14.0;
    return make_pattern(d, c, {0.0, d1, 1.0 - d1}, {37.0 / 135, 49.0 / 135, 49.0 / 135});
  }
  if (d == 9 && c == 1) {
    const double d1 = (3.0 - std::sqrt(3.0)) / 6.0;
    return make_pattern(d, c, {0.0, d1, 0.5, 1.0 - d1},
                        {19.0 / 105, 27.0 / 105, 32.0 / 105, 27.0 / 105});
  }
  if (d == 5 && c == 0) {
    const double d1 = 0.07182558071116236600;
    const double d2 = (5.0 - std::sqrt(5.0)) / 10.0;
    return make_pattern(d, c, {d1, 0.5, 1.0 - d1, 1.0 + d2, 2.0 - d2},
                        {45.0 / 132, 64.0 / 132, 45.0 / 132, 55.0 / 132, 55.0 / 132});
  }
  if (d == 5 && c == 2) {
    const double x = from_y((-14.0 + std::sqrt(14.0 * 14.0 + 4.0 * 164.0 * 5.0)) / 328.0);
    const double w1 = 0.66723184144087066164;
    return make_pattern(d, c, {x, 1.0 - x, 1.5}, {w1, w1, 2.0 - 2.0 * w1});
  }
  if (d == 7 && c == 0) {
    const double s = std::sqrt(29.0 * 29.0 - 4.0 * 112.0);
    const double x1 = from_y((29.0 - s) / 224.0);
    const double x2 = from_y((29.0 + s) / 224.0);
    const double w1 = 0.20648114717852759795, w2 = 0.34351885282147240205;
    const double e = std::sqrt(21.0) / 14.0;
    return make_pattern(d, c, {x1, x2, 1.0 - x2, 1.0 - x1, 1.5 - e, 1.5, 1.5 + e},
                        {w1, w2, w2, w1, 49.0 / 180, 64.0 / 180, 49.0 / 180});
  }
  return solve_asymptotic_system(d, c);
}

std::optional<int> default_boundary_depth(int d, int c) {
  if (c == 0) return 1;
  if (c == 1) return 4;
  (void)d;
  return std::nullopt;
}

Deviation element_deviation(const QuadratureRule& rule, int elements,
                            const AsymptoticPattern& pattern, int e) {
  const double a = rule.interval.a;
  const double h = rule.interval.length() / elements;
  const int P = pattern.period;
  Deviation best_dev{std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
  for (int shift = 0; shift < P; ++shift) {
    Deviation dev;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double u = (rule.nodes[j] - a) / h;
      if (static_cast<int>(std::floor(u + 1e-6)) != e) continue;
      double best = std::numeric_limits<double>::infinity();
      double wbest = 0.0;
      const int base = static_cast<int>(std::floor((u - shift) / P));
      for (int q = base - 1; q <= base + 1; ++q) {
        for (std::size_t k = 0; k < pattern.offsets.size(); ++k) {
          const double dist = std::abs(u - (pattern.offsets[k] + shift + q * P));
          if (dist < best) {
            best = dist;
            wbest = pattern.weights[k];
          }
        }
      }
      dev.node = std::max(dev.node, best);
      dev.weight = std::max(dev.weight, std::abs(rule.weights[j] / h - wbest));
    }
    if (std::max(dev.node, dev.weight) < std::max(best_dev.node, best_dev.weight)) best_dev = dev;
  }
  return best_dev;
}

QuadratureRule hybrid_rule(int d, int c, int N, int depth, Interval interval,
                           const TraceConfig& cfg) {
  check_pair(d, c);
  if (depth < 1) throw std::invalid_argument("boundary depth must be at least 1");
  if (!(interval.b > interval.a)) interval = Interval{0.0, static_cast<double>(N)};
  const SplineSpace target(d, KnotVector::uniform(d, c, N, interval.a, interval.b));
  const double h = interval.length() / N;
  source_space(target);  // throws ParityError for an odd dimension

  const int N0 = 4 * depth + 3;
  if (N <= N0) {
    auto res = trace(target, cfg);
    if (res.status != TraceStatus::Converged) {
      throw std::runtime_error("trace did not converge: " + res.message);
    }
    return res.rule;
  }

  const SplineSpace small(d, KnotVector::uniform(d, c, N0, 0.0, N0));
  auto res = trace(small, cfg);
  if (res.status != TraceStatus::Converged) {
    throw std::runtime_error("boundary trace did not converge: " + res.message);
  }
  const auto& tr = res.rule;
  auto element_of = [](double u) { return static_cast<int>(std::floor(u + 1e-6)); };

  std::vector<double> bx, bw;
  int count_at_depth = 0;
  for (std::size_t j = 0; j < tr.nodes.size(); ++j) {
    const int e = element_of(tr.nodes[j]);
    if (e < depth) {
      bx.push_back(tr.nodes[j]);
      bw.push_back(tr.weights[j]);
    } else if (e == depth) {
      ++count_at_depth;
    }
  }

  const auto pattern = asymptotic_rule(d, c);
  const int P = pattern.period;
  // Pattern element aligned with element `depth` of the traced rule.
  int phase = 0;
  if (P == 2) {
    const int n0 = static_cast<int>(pattern.element_nodes(0).size());
    const int n1 = static_cast<int>(pattern.element_nodes(1).size());
    if (count_at_depth == n1 && n1 != n0) phase = 1;
  }

  QuadratureRule rule;
  rule.interval = interval;
  for (std::size_t j = 0; j < bx.size(); ++j) {
    rule.nodes.push_back(interval.a + h * bx[j]);
    rule.weights.push_back(h * bw[j]);
  }
  const double lo = depth, hi = N - depth;
  for (int start = depth - phase - P; start <= N - depth + P; start += P) {
    for (std::size_t k = 0; k < pattern.offsets.size(); ++k) {
      const double u = start + pattern.offsets[k];
      if (u < lo - 1e-9 || u > hi + 1e-9) continue;
      rule.nodes.push_back(interval.a + h * u);
      rule.weights.push_back(h * pattern.weights[k]);
    }
  }
  for (std::size_t j = bx.size(); j-- > 0;) {
    rule.nodes.push_back(interval.b - h * bx[j]);
    rule.weights.push_back(h * bw[j]);
  }

  if (2 * static_cast<int>(rule.nodes.size()) != target.dimension()) {
    std::ostringstream msg;
    msg << "hybrid rule has " << rule.nodes.size() << " nodes, expected "
        << target.dimension() / 2;
    throw std::runtime_error(msg.str());
  }
  rule.describe(target);
  rule.residual_norm = residual_norm(target, rule);
  rule.trace = res.rule.trace;
  return rule;
}

}  // namespace splinequad
