#include "gapcert/lp.hpp"

#include "doctest.h"

using namespace gapcert;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("simplex solves a textbook LP") {
  // max 3x + 2y st x + y <= 4, x + 3y <= 6, x,y >= 0 -> (4, 0), obj 12.
  LinearProgram lp(2);
  lp.add_row(vec({1, 1}), 4, false);
  lp.add_row(vec({1, 3}), 6, false);
  lp.set_objective(vec({3, 2}));
  auto res = lp.solve();
  REQUIRE(res.status == LinearProgram::Status::Optimal);
  CHECK(res.objective == doctest::Approx(12.0));
  CHECK(res.x[0] == doctest::Approx(4.0));
  CHECK(res.x[1] == doctest::Approx(0.0));
}

TEST_CASE("equality rows and negative rhs") {
  // max x - y st x + y = 1, x - y <= -0.5 -> x = 0.25, y = 0.75.
  LinearProgram lp(2);
  lp.add_row(vec({1, 1}), 1, true);
  lp.add_row(vec({1, -1}), -0.5, false);
  lp.set_objective(vec({1, -1}));
  auto res = lp.solve();
  REQUIRE(res.status == LinearProgram::Status::Optimal);
  CHECK(res.x[0] == doctest::Approx(0.25));
  CHECK(res.x[1] == doctest::Approx(0.75));
}

TEST_CASE("infeasible and unbounded detection") {
  LinearProgram bad(1);
  bad.add_row(vec({1}), 1, true);
  bad.add_row(vec({1}), 2, true);
  CHECK_FALSE(bad.feasible());
  CHECK(bad.solve().status == LinearProgram::Status::Infeasible);

  LinearProgram unb(1);
  unb.add_row(vec({-1}), 0, false);
  unb.set_objective(vec({1}));
  CHECK(unb.solve().status == LinearProgram::Status::Unbounded);
}

TEST_CASE("degenerate equalities stay feasible") {
  // Redundant system: x + y = 1 stated twice.
  LinearProgram lp(2);
  lp.add_row(vec({1, 1}), 1, true);
  lp.add_row(vec({1, 1}), 1, true);
  lp.set_objective(vec({0, 1}));
  auto res = lp.solve();
  REQUIRE(res.status == LinearProgram::Status::Optimal);
  CHECK(res.x.sum() == doctest::Approx(1.0));
  CHECK(res.objective == doctest::Approx(1.0));
}

TEST_CASE("solve_many reuses one phase-1 run") {
  LinearProgram lp(3);
  lp.add_row(vec({1, 1, 1}), 1, true);
  std::vector<Vector> objs = {vec({1, 0, 0}), vec({0, 1, 0}), vec({-1, -1, -1})};
  auto res = lp.solve_many(objs);
  REQUIRE(res.size() == 3);
  CHECK(res[0].objective == doctest::Approx(1.0));
  CHECK(res[1].objective == doctest::Approx(1.0));
  CHECK(res[2].objective == doctest::Approx(-1.0));
}
