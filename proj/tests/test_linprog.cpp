#include <cmath>
#include <random>

#include <doctest.h>

#include "curvgraph/linprog.hpp"

using namespace curvgraph::lp;

TEST_CASE("textbook LP with duals") {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), value 36
  Problem p;
  p.num_vars = 2;
  p.objective = {-3.0, -5.0};
  p.add_row({{{0, 1.0}}, Sense::le, 4.0});
  p.add_row({{{1, 2.0}}, Sense::le, 12.0});
  p.add_row({{{0, 3.0}, {1, 2.0}}, Sense::le, 18.0});
  const Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(-36.0));
  CHECK(s.x[0] == doctest::Approx(2.0));
  CHECK(s.x[1] == doctest::Approx(6.0));
  double dual = 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) dual += s.duals[i] * p.rows[i].rhs;
  CHECK(dual == doctest::Approx(-36.0));
  CHECK(s.duals[0] == doctest::Approx(0.0));
  CHECK(s.duals[1] == doctest::Approx(-1.5));
  CHECK(s.duals[2] == doctest::Approx(-1.0));
}

TEST_CASE("equality rows, ge rows and free variables") {
  // min x + 2y + z - w  s.t. x + y + z = 3, y - z >= 1, w free, w - x = 0.5, w <= 2
  Problem p;
  p.num_vars = 4;
  p.objective = {1.0, 2.0, 1.0, -1.0};
  p.free_var = {false, false, false, true};
  p.add_row({{{0, 1.0}, {1, 1.0}, {2, 1.0}}, Sense::eq, 3.0});
  p.add_row({{{1, 1.0}, {2, -1.0}}, Sense::ge, 1.0});
  p.add_row({{{3, 1.0}, {0, -1.0}}, Sense::eq, 0.5});
  p.add_row({{{3, 1.0}}, Sense::le, 2.0});
  const Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  // w = x + 0.5 cancels x; minimize 2y + z with y + z = 3 - x, y - z >= 1.
  // x as large as allowed: x = 1.5, then y + z = 1.5, y >= z + 1 -> y=1.25,z=.25
  CHECK(s.objective == doctest::Approx(2 * 1.25 + 0.25 - 0.5));
  double dual = 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) dual += s.duals[i] * p.rows[i].rhs;
  CHECK(dual == doctest::Approx(s.objective));
}

TEST_CASE("infeasible and unbounded") {
  Problem inf;
  inf.num_vars = 1;
  inf.objective = {1.0};
  inf.add_row({{{0, 1.0}}, Sense::le, -1.0});
  CHECK(solve(inf).status == Status::infeasible);

  Problem unb;
  unb.num_vars = 2;
  unb.objective = {-1.0, 0.0};
  unb.add_row({{{0, 1.0}, {1, -1.0}}, Sense::le, 1.0});
  CHECK(solve(unb).status == Status::unbounded);
}

TEST_CASE("random transport LPs satisfy strong duality") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 6;
    std::vector<double> a(n), b(n);
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      sa += a[i];
      sb += b[i];
    }
    Problem p;
    p.num_vars = n * n;
    for (std::size_t k = 0; k < n * n; ++k) p.objective.push_back(u(rng));
    for (std::size_t i = 0; i < n; ++i) {
      Row r{{}, Sense::eq, a[i] / sa};
      for (std::size_t j = 0; j < n; ++j) r.terms.push_back({i * n + j, 1.0});
      p.add_row(r);
    }
    for (std::size_t j = 0; j < n; ++j) {
      Row r{{}, Sense::eq, b[j] / sb};
      for (std::size_t i = 0; i < n; ++i) r.terms.push_back({i * n + j, 1.0});
      p.add_row(r);
    }
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    double dual = 0.0;
    for (std::size_t i = 0; i < p.rows.size(); ++i) dual += s.duals[i] * p.rows[i].rhs;
    CHECK(std::abs(dual - s.objective) <= 1e-10);
    // dual feasibility: y_i + y_j <= c_ij
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(s.duals[i] + s.duals[n + j] <= p.objective[i * n + j] + 1e-10);
      }
    }
  }
}
