#pragma once
// Independent reference computations for the tests. Nothing here calls the
// library's numerical routines.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Rule {
  std::vector<double> x, w;
};

/// Gauss-Legendre on [-1,1] from the eigen-decomposition of the Jacobi matrix.
inline Rule golub_welsch(int q) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  for (int i = 0; i < q; ++i) {
    r.x.push_back(es.eigenvalues()[i]);
    const double v = es.eigenvectors()(0, i);
    r.w.push_back(2.0 * v * v);
  }
  return r;
}

/// Textbook recursive Cox-de Boor value of B_{i,p} on the full knot list,
/// right-continuous, with the last non-empty interval closed on the right.
inline double cox_de_boor(const std::vector<double>& t, int i, int p, double u) {
  if (p == 0) {
    if (t[i] <= u && u < t[i + 1]) return 1.0;
    // closed at the right end of the knot span
    if (u == t.back() && t[i] < t[i + 1] && t[i + 1] == t.back()) return 1.0;
    return 0.0;
  }
  double v = 0.0;
  if (t[i + p] > t[i]) v += (u - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, u);
  if (t[i + p + 1] > t[i + 1]) {
    v += (t[i + p + 1] - u) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, u);
  }
  return v;
}

/// Integral of f over [a,b] split at `breaks`, q-point Gauss per piece.
inline double integrate(const std::function<double(double)>& f, std::vector<double> breaks,
                        int q = 64) {
  const Rule r = golub_welsch(q);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double s = 0.0;
  for (std::size_t e = 0; e + 1 < breaks.size(); ++e) {
    const double h = 0.5 * (breaks[e + 1] - breaks[e]);
    const double m = 0.5 * (breaks[e + 1] + breaks[e]);
    for (int k = 0; k < q; ++k) s += h * r.w[k] * f(m + h * r.x[k]);
  }
  return s;
}

/// Divided difference [x_0..x_n] of g for distinct abscissae.
inline double divided_difference(const std::vector<double>& x,
                                 const std::function<double(double)>& g) {
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = g(x[i]);
  for (std::size_t k = 1; k < x.size(); ++k) {
    for (std::size_t i = x.size() - 1; i >= k; --i) {
      c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - k]);
      if (i == k) break;
    }
  }
  return c.back();
}

/// Normalized B-spline on simple knots x_0 < ... < x_{d+1}:
/// (x_{d+1} - x_0) [x_0..x_{d+1}] (. - u)_+^d.
inline double truncated_power_bspline(const std::vector<double>& x, double u) {
  const int d = static_cast<int>(x.size()) - 2;
  return (x.back() - x.front()) *
         divided_difference(x, [&](double s) { return s > u ? std::pow(s - u, d) : 0.0; });
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace oracle
