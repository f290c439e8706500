#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "splinequad/galerkin.hpp"

using namespace splinequad;

namespace {

KnotVector mesh(int N, double a = 0.0, double b = -1.0) {
  if (b < a) b = N;
  return KnotVector::uniform(1, 0, N, a, b);
}

// Mass and stiffness entries by fine Gauss quadrature of the recursive
// B-spline definition.
Matrices reference(const DiscretizationSpec& spec, const KnotVector& m) {
  const SplineSpace t = trial_space(spec, m);
  const auto& T = t.expanded_knots();
  const int n = t.dimension(), p = spec.p;
  auto deriv = [&](int i, double u) {
    double v = 0.0;
    if (T[i + p] > T[i]) v += p / (T[i + p] - T[i]) * oracle::cox_de_boor(T, i, p - 1, u);
    if (T[i + p + 1] > T[i + 1]) {
      v -= p / (T[i + p + 1] - T[i + 1]) * oracle::cox_de_boor(T, i + 1, p - 1, u);
    }
    return v;
  };
  Matrices M{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n && j <= i + p; ++j) {
      std::vector<double> br(T.begin() + j, T.begin() + i + p + 2);
      M.mass(i, j) = M.mass(j, i) = oracle::integrate(
          [&](double u) { return oracle::cox_de_boor(T, i, p, u) * oracle::cox_de_boor(T, j, p, u); },
          br, 16);
      M.stiffness(i, j) = M.stiffness(j, i) =
          oracle::integrate([&](double u) { return deriv(i, u) * deriv(j, u); }, br, 16);
    }
  }
  return M;
}

}  // namespace

TEST_CASE("rule spaces") {
  CHECK(rule_space({3, 2, 1}) == std::pair{7, 1});
  CHECK(rule_space({2, 1, 1}) == std::pair{5, 0});
  CHECK(rule_space({1, 0, 0}) == std::pair{3, 0});
  const auto s = integrand_space({3, 2, 1}, mesh(4));
  CHECK(s.degree() == 7);
  CHECK(s.uniform_continuity() == 1);
  const auto tr = trial_space({3, 2, 1}, mesh(4));
  CHECK(tr.degree() == 3);
  CHECK(tr.uniform_continuity() == 2);
  CHECK(dimension(tr) == 7);
}

TEST_CASE("discretization validation") {
  CHECK_THROWS_AS(DiscretizationSpec({0, 0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DiscretizationSpec({2, 2, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DiscretizationSpec({2, 1, 3}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DiscretizationSpec({3, 0, 2}).validate(), std::invalid_argument);
  CHECK_NOTHROW(DiscretizationSpec({2, 1, 1}).validate());
}

TEST_CASE("linear hat functions") {
  const DiscretizationSpec spec{1, 0, 1};
  const int N = 7;
  const double h = 0.5;
  const auto m = mesh(N, 0.0, N * h);
  const auto M = assemble(spec, m, optimal_rule(spec, m));
  REQUIRE(M.mass.rows() == N + 1);
  for (int i = 1; i < N; ++i) {
    CHECK(M.mass(i, i) == doctest::Approx(2 * h / 3).epsilon(1e-13));
    CHECK(M.mass(i, i - 1) == doctest::Approx(h / 6).epsilon(1e-13));
    CHECK(M.mass(i, i + 1) == doctest::Approx(h / 6).epsilon(1e-13));
    CHECK(M.stiffness(i, i) == doctest::Approx(2 / h).epsilon(1e-13));
    CHECK(M.stiffness(i, i + 1) == doctest::Approx(-1 / h).epsilon(1e-13));
  }
  CHECK(M.mass(0, 0) == doctest::Approx(h / 3).epsilon(1e-13));
}

TEST_CASE("matrix invariants") {
  for (DiscretizationSpec spec : {DiscretizationSpec{2, 1, 1}, {3, 2, 1}, {3, 1, 1}, {2, 0, 0},
                                  {3, 2, 2}}) {
    CAPTURE(spec.p);
    CAPTURE(spec.k);
    CAPTURE(spec.l);
    for (int N : {1, 3, 11}) {
      const auto m = mesh(N, -1.0, 2.0);
      const auto rule = optimal_rule(spec, m);
      const auto M = assemble(spec, m, rule);
      const SplineSpace t = trial_space(spec, m);
      const auto& T = t.expanded_knots();
      CHECK((M.mass - M.mass.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((M.stiffness - M.stiffness.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(M.mass.llt().info() == Eigen::Success);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(t.dimension());
      CHECK((M.stiffness * ones).cwiseAbs().maxCoeff() <= 1e-12);
      // row sums are the basis integrals
      const Eigen::VectorXd rows = M.mass * ones;
      for (int i = 0; i < t.dimension(); ++i) {
        CHECK(std::abs(rows[i] - (T[i + spec.p + 1] - T[i]) / (spec.p + 1)) <= 1e-13);
      }
      const auto R = reference(spec, m);
      CHECK(relative_difference(M.mass, R.mass) <= 1e-13);
      if (spec.l >= 1) CHECK(relative_difference(M.stiffness, R.stiffness) <= 1e-12);
      const auto C = assemble(spec, m, classical_rule(spec, m));
      CHECK(relative_difference(M.mass, C.mass) <= 1e-12);
      if (spec.l >= 1) CHECK(relative_difference(M.stiffness, C.stiffness) <= 1e-12);
    }
  }
}

TEST_CASE("node savings") {
  const DiscretizationSpec spec{3, 2, 1};
  const auto rep = savings_report(spec, mesh(30));
  CHECK(rep.classical_interior_per_element == doctest::Approx(4.0));
  CHECK(rep.optimal_interior_per_element == doctest::Approx(3.0));
  CHECK(rep.optimal_nodes < rep.classical_nodes);
  CHECK(rep.classical_nodes == 120);
  CHECK(rep.mass_difference <= 1e-12);
  CHECK(rep.stiffness_difference <= 1e-12);

  const auto one = savings_report(spec, mesh(1));
  CHECK(one.optimal_nodes == one.classical_nodes);
}

TEST_CASE("classical rule") {
  const auto r = classical_rule({2, 1, 1}, mesh(3));
  CHECK(r.size() == 9);
  const auto g = oracle::golub_welsch(3);
  CHECK(std::abs(r.nodes[4] - (1.5 + 0.5 * g.x[1])) <= 1e-15);
}

TEST_CASE("assembly checks its rule") {
  const DiscretizationSpec spec{2, 1, 1};
  auto rule = classical_rule(spec, mesh(3));
  CHECK_THROWS_AS(assemble(spec, mesh(3, 0.0, 6.0), rule), std::invalid_argument);
  rule.nodes.back() = 5.0;
  CHECK_THROWS_AS(assemble(spec, mesh(3), rule), std::invalid_argument);
}

TEST_CASE("matrix output") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.0, 0.1, -2.5;
  CHECK(to_csv(A) == "1,0\n0.10000000000000001,-2.5\n");
  CHECK(to_triplets(A) == "0 0 1\n1 0 0.10000000000000001\n1 1 -2.5\n");
}
