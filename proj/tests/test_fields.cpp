#include "gapcert/fields.hpp"

#include "doctest.h"

using namespace gapcert;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("scalar poly parse and eval") {
  ScalarPoly p = ScalarPoly::parse("x1 - 1", {"t", "x1"});
  Vector vals(2);
  vals << 0.0, 3.0;
  CHECK(p.eval(vals) == doctest::Approx(2.0));

  ScalarPoly q = ScalarPoly::parse("2*x1^2*x2 - t + 0.5", {"t", "x1", "x2"});
  Vector v3(3);
  v3 << 1.0, 2.0, 3.0;
  CHECK(q.eval(v3) == doctest::Approx(2 * 4 * 3 - 1 + 0.5));

  ScalarPoly neg = ScalarPoly::parse("-x1", {"t", "x1"});
  CHECK(neg.eval(vals) == doctest::Approx(-3.0));
}

TEST_CASE("scalar poly gradient matches finite differences") {
  ScalarPoly p = ScalarPoly::parse("x1*x2 + 3*x2^3 - 2*t*x1", {"t", "x1", "x2"});
  Vector vals(3);
  vals << 0.7, -1.3, 2.1;
  Vector g(3);
  p.grad(vals, g);
  for (int i = 0; i < 3; ++i) {
    Vector vp = vals, vm = vals;
    vp[i] += 1e-6;
    vm[i] -= 1e-6;
    double fd = (p.eval(vp) - p.eval(vm)) / 2e-6;
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("poly derivative is exact") {
  ScalarPoly p = ScalarPoly::parse("x1^3*x2 - t^2", {"t", "x1", "x2"});
  ScalarPoly dx1 = p.derivative(1);
  Vector vals(3);
  vals << 2.0, 3.0, 5.0;
  CHECK(dx1.eval(vals) == doctest::Approx(3 * 9 * 5));
}

TEST_CASE("vector field constructors") {
  VectorField g1 = VectorField::make("const(1,0,0)", 3, 0);
  Vector out(3);
  g1.eval(0.0, vec3(9, 9, 9), Vector(), out);
  CHECK(out.isApprox(vec3(1, 0, 0)));

  VectorField g2 = VectorField::make("poly(0; -1; -x1)", 3, 0);
  g2.eval(0.0, vec3(2, 0, 0), Vector(), out);
  CHECK(out.isApprox(vec3(0, -1, -2)));

  Matrix jac;
  g2.jac_x(0.0, vec3(2, 0, 0), Vector(), jac);
  CHECK(jac(2, 0) == doctest::Approx(-1.0));
  CHECK(jac.cwiseAbs().sum() == doctest::Approx(1.0));

  VectorField aff = VectorField::make("affine(1,2; 0,1; 1,0)", 2, 0);
  Vector out2(2), x2(2);
  x2 << 3, 4;
  aff.eval(0.0, x2, Vector(), out2);
  CHECK(out2[0] == doctest::Approx(1 + 4));
  CHECK(out2[1] == doctest::Approx(2 + 3));
}

TEST_CASE("tent field and its a.e. slope") {
  VectorField f = VectorField::make("tent(1,2,12)", 2, 0);
  Vector out(2), x(2);
  x << 0.5, 0.0;
  f.eval(0.0, x, Vector(), out);
  CHECK(out[1] == doctest::Approx(12.0));
  x[0] = 0.25;
  f.eval(0.0, x, Vector(), out);
  CHECK(out[1] == doctest::Approx(0.0));
  x[0] = 0.375;
  f.eval(0.0, x, Vector(), out);
  CHECK(out[1] == doctest::Approx(6.0));
  Matrix jac;
  f.jac_x(0.0, x, Vector(), jac);
  CHECK(jac(1, 0) == doctest::Approx(48.0));
}

TEST_CASE("parse errors carry context") {
  CHECK_THROWS_AS(VectorField::make("const(1,2)", 3, 0), LoadError);
  CHECK_THROWS_AS(VectorField::make("nosuch(1)", 3, 0), LoadError);
  CHECK_THROWS_AS(ScalarPoly::parse("x9 + 1", {"t", "x1"}), LoadError);
}
