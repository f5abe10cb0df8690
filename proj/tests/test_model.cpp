#include "gapcert/model.hpp"

#include "doctest.h"
#include "gapcert/builtin.hpp"
#include "gapcert/integrate.hpp"

using namespace gapcert;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

ProblemSpec scalar_integrator() {
  // xdot = u as a control-polynomial problem: n = m = d = 1, f = 0, g = 1.
  return parse_problem(R"(
[dynamics]
n = 1
m = 1
d = 1
g k=1 j=1 field=const(1)
[constraint]
h = -1
[target]
box t = 1 1
[cost]
psi = -x1
[init]
x0 = 0
[horizon]
bound = 3
)",
                       "scalar");
}

}  // namespace

TEST_CASE("ex51 problem file loads and matches the displayed data") {
  ProblemSpec spec = builtin::ex51();
  CHECK(spec.n() == 3);
  CHECK(spec.m() == 2);
  CHECK(spec.d() == 1);
  CHECK(spec.budget == doctest::Approx(2.0));
  CHECK(spec.x0.isApprox(vec3(1, 0, 0)));
  CHECK(spec.target.contains(1.0, vec3(-0.5, 0.5, 0.5)));
  CHECK_FALSE(spec.target.contains(1.0, vec3(0.5, 0.5, 0.5)));
  CHECK(spec.h.eval(0.0, spec.x0) == doctest::Approx(0.0));
}

TEST_CASE("multi-index violations are load errors") {
  CHECK_THROWS_WITH_AS(parse_problem(R"(
[dynamics]
n = 1
m = 2
d = 2
g k=2 j=2,1 field=const(1)
[constraint]
h = -1
[target]
box t = 1 1
[cost]
psi = x1
[init]
x0 = 0
[horizon]
bound = 1
)",
                                     "bad"),
                       doctest::Contains("not nondecreasing"), LoadError);

  CHECK_THROWS_AS(parse_problem("[dynamics]\nn=1\nm=1\nd=1\n", "bad2"), LoadError);
}

TEST_CASE("scalar minimal instance is valid") {
  ProblemSpec spec = scalar_integrator();
  CHECK(spec.n() == 1);
  CHECK(spec.num_params() == 1);
}

TEST_CASE("extended dynamics evaluation on ex51") {
  ProblemSpec spec = builtin::ex51();
  SpaceTimeControlSample s;
  s.w0 = 0.0;
  s.w = Vector(2);
  s.w << 0.0, -1.0;
  // F = g2 * (-1) = (0, 1, x1); at x = (1,0,0) gives (0,1,1).
  Vector f = eval_extended_dynamics(spec, 0.0, vec3(1, 0, 0), s);
  CHECK(f.isApprox(vec3(0, 1, 1)));

  // Pure drift: (w0, w) = (1, 0) gives f(t,x,a).
  s.w0 = 1.0;
  s.w.setZero();
  Vector drift = eval_extended_dynamics(spec, 0.0, vec3(1, 2, 3), s);
  CHECK(drift.isApprox(vec3(0, 6, 0)));
}

TEST_CASE("scalar closed-form evaluation") {
  ProblemSpec spec = scalar_integrator();
  SpaceTimeControlSample s;
  s.w0 = 0.5;
  s.w = Vector(1);
  s.w << 0.5;
  Vector f = eval_extended_dynamics(spec, 0.0, Vector::Zero(1), s);
  CHECK(f[0] == doctest::Approx(0.5));
}

TEST_CASE("fast dynamics drops the drift") {
  ProblemSpec spec = builtin::ex51();
  Vector w(2);
  w << -1.0, 0.0;
  Vector f = eval_fast_dynamics(spec, 0.0, vec3(1, 0, 0), w);
  CHECK(f.isApprox(vec3(-1, 0, 0)));

  // Consistency with the extended dynamics at w0 = 0.
  SpaceTimeControlSample s;
  s.w0 = 0.0;
  s.w = w;
  CHECK(f.isApprox(eval_extended_dynamics(spec, 0.0, vec3(1, 0, 0), s)));
}

TEST_CASE("even-degree fast dynamics is sign-symmetric") {
  ProblemSpec spec = parse_problem(R"(
[dynamics]
n = 1
m = 1
d = 2
g k=2 j=1,1 field=const(1)
[constraint]
h = -1
[target]
box t = 1 1
[cost]
psi = x1
[init]
x0 = 0
[horizon]
bound = 1
)",
                                   "deg2");
  Vector w(1);
  w << 1.0;
  Vector fp = eval_fast_dynamics(spec, 0.0, Vector::Zero(1), w);
  Vector fm = eval_fast_dynamics(spec, 0.0, Vector::Zero(1), -w);
  CHECK(fp.isApprox(fm));
  CHECK(fp[0] == doctest::Approx(1.0));
}

TEST_CASE("feasibility record on the ex51 reference") {
  ProblemSpec spec = builtin::ex51();
  Process proc = builtin::ex51_reference(100);
  FeasibilityRecord rec = check_feasibility(spec, proc, 1e-9);
  CHECK(rec.max_constraint_violation <= 1e-12);
  CHECK(rec.target_distance <= 1e-12);
  CHECK(rec.budget_excess <= 1e-12);
  CHECK(rec.feasible(1e-9));

  // Budget arithmetic.
  Process over = proc;
  over.traj(over.intervals(), over.traj.cols() - 1) = 2.5;
  FeasibilityRecord rec2 = check_feasibility(spec, over, 1e-9);
  CHECK(rec2.budget_excess == doctest::Approx(0.5));
}

TEST_CASE("target distance is a point-in-polyhedron check") {
  ProblemSpec spec = builtin::ex51();
  CHECK(spec.target.distance(1.0, vec3(-0.5, 0.5, 0.5)) == doctest::Approx(0.0));
  CHECK(spec.target.distance(1.0, vec3(0.5, 0.5, 0.5)) == doctest::Approx(0.5));
}

TEST_CASE("general-row target distance agrees with box form") {
  // Same box declared as rows; distances must agree on samples.
  ProblemSpec spec = parse_problem(R"(
[dynamics]
n = 1
m = 1
d = 1
g k=1 j=1 field=const(1)
[constraint]
h = -1
[target]
row 1 0 <= 1
row -1 0 <= -1
row 0 1 <= 2
[cost]
psi = x1
[init]
x0 = 0
[horizon]
bound = 3
)",
                                   "rows");
  Vector x(1);
  x << 3.0;
  CHECK(spec.target.distance(1.0, x) == doctest::Approx(1.0));
  x << 1.0;
  CHECK(spec.target.distance(2.0, x) == doctest::Approx(1.0));
  x << 2.0;
  CHECK(spec.target.distance(0.0, x) == doctest::Approx(1.0));
}

TEST_CASE("cone membership") {
  ControlCone sign = ControlCone::all_free(2);
  Vector w(2);
  w << -1, 5;
  CHECK(sign.contains(w));
  sign.sign[0] = ControlCone::Sign::NonNeg;
  CHECK_FALSE(sign.contains(w));

  ControlCone rays;
  rays.sign_form = false;
  rays.rays.resize(2, 2);
  rays.rays << 1, 0, 0, 1;  // first quadrant
  w << 2, 3;
  CHECK(rays.contains(w));
  w << -1, 1;
  CHECK_FALSE(rays.contains(w));
}

TEST_CASE("relaxed vertex weight reproduces the extended flow") {
  ProblemSpec spec = builtin::ex51();
  Process ext = builtin::ex51_reference(40);

  Process rel;
  rel.layer = Layer::Relaxed;
  rel.grid = ext.grid;
  rel.simplex.resize(ext.intervals());
  for (int i = 0; i < ext.intervals(); ++i) {
    SimplexControlRow& row = rel.simplex[i];
    row.lambda = Vector::Zero(spec.n() + 1);
    row.lambda[0] = 1.0;
    SpaceTimeControlSample filler;
    filler.w0 = 1.0;
    filler.w = Vector::Zero(spec.m());
    row.rows.assign(spec.n() + 1, filler);
    row.rows[0] = ext.controls[i];
  }
  rel.traj.resize(ext.intervals() + 1, 2 + spec.n());
  rel.xi = Matrix::Zero(ext.intervals() + 1, spec.n() + 1);

  DynamicsEvaluator ev(spec);
  double y0 = 0.0, nu = 0.0;
  Vector y = spec.x0;
  Vector xi = Vector::Zero(spec.n() + 1);
  rel.traj(0, 0) = 0;
  rel.traj.row(0).segment(1, spec.n()) = y.transpose();
  rel.traj(0, 1 + spec.n()) = 0;
  for (int i = 0; i < ext.intervals(); ++i) {
    ev.advance_relaxed(rel.grid[i + 1] - rel.grid[i], rel.simplex[i], y0, y, nu, xi, 1);
    rel.traj(i + 1, 0) = y0;
    rel.traj.row(i + 1).segment(1, spec.n()) = y.transpose();
    rel.traj(i + 1, 1 + spec.n()) = nu;
    rel.xi.row(i + 1) = xi.transpose();
  }
  CHECK((rel.traj - ext.traj).cwiseAbs().maxCoeff() <= 1e-12);
  rel.validate(spec);
}

TEST_CASE("process validation catches broken invariants") {
  ProblemSpec spec = builtin::ex51();
  Process proc = builtin::ex51_reference(20);
  proc.validate(spec);

  Process bad = proc;
  bad.layer = Layer::Strict;  // reference has fast arcs with w0 = 0
  CHECK_THROWS_AS(bad.validate(spec), InvariantError);

  Process bad2 = proc;
  bad2.grid[3] = bad2.grid[4];
  CHECK_THROWS_AS(bad2.validate(spec), InvariantError);
}

TEST_CASE("dynamics residual of an integrated process vanishes") {
  ProblemSpec spec = builtin::ex51();
  Process proc = builtin::ex51_reference(50);
  CHECK(dynamics_residual(spec, proc) <= 1e-12);
}
