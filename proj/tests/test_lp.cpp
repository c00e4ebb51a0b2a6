#include <doctest.h>

#include <cmath>
#include <random>

#include "stpa/lp.hpp"

using namespace stpa::lp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// Minimum of c^T x over a bounded 2-D polygon by enumerating vertices.
double vertex_minimum(const Eigen::VectorXd& c, const std::vector<Eigen::VectorXd>& a, const std::vector<double>& b) {
  double best = INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      Eigen::Matrix2d m;
      m << a[i][0], a[i][1], a[j][0], a[j][1];
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Eigen::Vector2d x = m.inverse() * Eigen::Vector2d(b[i], b[j]);
      bool feasible = true;
      for (std::size_t k = 0; k < a.size(); ++k) feasible = feasible && a[k].dot(x) <= b[k] + 1e-9;
      if (feasible) best = std::min(best, c.dot(x));
    }
  return best;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("small LP optimum") {
    RowLp lp(vec({-1.0, -1.0}));
    lp.add_row(vec({1, 0}), 1.0);
    lp.add_row(vec({0, 1}), 2.0);
    lp.add_row(vec({1, 1}), 2.5);
    lp.add_row(vec({-1, 0}), 0.0);
    lp.add_row(vec({0, -1}), 0.0);
    const auto s = lp.solve();
    REQUIRE(s.status == Status::kOptimal);
    CHECK(s.objective == doctest::Approx(-2.5));
    CHECK(s.x[0] + s.x[1] == doctest::Approx(2.5));
  }

  TEST_CASE("unbounded and infeasible problems are reported") {
    RowLp unbounded(vec({-1.0, 0.0}));
    unbounded.add_row(vec({0, 1}), 1.0);
    unbounded.add_row(vec({0, -1}), 1.0);
    CHECK(unbounded.solve().status == Status::kUnbounded);

    RowLp infeasible(vec({1.0}));
    infeasible.add_row(vec({1.0}), -1.0);
    infeasible.add_row(vec({-1.0}), -1.0);
    CHECK(infeasible.solve().status == Status::kInfeasible);
  }

  TEST_CASE("random polygons agree with vertex enumeration, with and without warm start") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
      const Eigen::VectorXd c = vec({n(rng), n(rng)});
      std::vector<Eigen::VectorXd> a;
      std::vector<double> b;
      for (int k = 0; k < 8; ++k) {  // box keeps the polygon bounded
        const double ang = 2.0 * 3.141592653589793 * k / 8;
        a.push_back(vec({std::cos(ang), std::sin(ang)}));
        b.push_back(3.0);
      }
      for (int k = 0; k < 10; ++k) {
        a.push_back(vec({n(rng), n(rng)}));
        b.push_back(1.0 + std::abs(n(rng)));
      }
      const double expected = vertex_minimum(c, a, b);

      RowLp fresh(c);
      for (std::size_t k = 0; k < a.size(); ++k) fresh.add_row(a[k], b[k]);
      const auto s = fresh.solve();
      REQUIRE(s.status == Status::kOptimal);
      CHECK(s.objective == doctest::Approx(expected).epsilon(1e-9));

      RowLp warm(c);
      for (std::size_t k = 0; k < 8; ++k) warm.add_row(a[k], b[k]);
      REQUIRE(warm.solve().status == Status::kOptimal);
      for (std::size_t k = 8; k < a.size(); ++k) {
        warm.add_row(a[k], b[k]);
        REQUIRE(warm.solve().status == Status::kOptimal);
      }
      const auto w = warm.solve();
      CHECK(w.objective == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  TEST_CASE("status names") {
    CHECK(std::string(to_string(Status::kOptimal)) != std::string(to_string(Status::kInfeasible)));
  }
}
