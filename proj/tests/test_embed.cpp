#include "gapcert/embed.hpp"

#include <random>

#include "doctest.h"
#include "gapcert/builtin.hpp"
#include "gapcert/integrate.hpp"

using namespace gapcert;

namespace {

ProblemSpec scalar_spec() {
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

OriginalProcess constant_control(const ProblemSpec& spec, double value, double T, int M) {
  Vector grid = uniform_grid(T, M);
  std::vector<Vector> u(M, Vector::Constant(spec.m(), value));
  std::vector<int> a(M, 0);
  return integrate_original(spec, grid, u, a);
}

// Sup distance between two original processes on the coarser grid.
double orig_distance(const OriginalProcess& a, const OriginalProcess& b) {
  double worst = std::abs(a.T - b.T);
  auto interp_traj = [](const OriginalProcess& p, double t, int col) {
    const Vector& xs = p.grid;
    const auto ys = p.traj.col(col);
    if (t <= xs[0]) return ys[0];
    if (t >= xs[xs.size() - 1]) return ys[xs.size() - 1];
    int lo = 0, hi = static_cast<int>(xs.size()) - 1;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (xs[mid] <= t ? lo : hi) = mid;
    }
    double f = (t - xs[lo]) / (xs[lo + 1] - xs[lo]);
    return ys[lo] + f * (ys[lo + 1] - ys[lo]);
  };
  for (int i = 0; i <= a.intervals(); ++i) {
    double t = a.grid[i];
    for (int c = 0; c < a.traj.cols(); ++c)
      worst = std::max(worst, std::abs(a.traj(i, c) - interp_traj(b, t, c)));
  }
  return worst;
}

}  // namespace

TEST_CASE("zero control embeds to the identity time change") {
  ProblemSpec spec = scalar_spec();
  OriginalProcess orig = constant_control(spec, 0.0, 1.0, 20);
  Process proc = embed_original(spec, orig);
  CHECK(proc.S() == doctest::Approx(1.0));
  for (const auto& c : proc.controls) {
    CHECK(c.w0 == doctest::Approx(1.0));
    CHECK(c.w.norm() == doctest::Approx(0.0));
  }
  for (int j = 0; j <= proc.intervals(); ++j) {
    CHECK(proc.y0(j) == doctest::Approx(proc.grid[j]));
    CHECK(proc.nu(j) == doctest::Approx(0.0));
  }
}

TEST_CASE("unit control embeds to the closed form") {
  // u = 1 on [0,1], d = 1: v(t) = t, sigma(t) = 2t, S = 2, (w0,w) = (1/2,1/2).
  ProblemSpec spec = scalar_spec();
  OriginalProcess orig = constant_control(spec, 1.0, 1.0, 25);
  Process proc = embed_original(spec, orig);
  CHECK(proc.S() == doctest::Approx(2.0));
  for (const auto& c : proc.controls) {
    CHECK(c.w0 == doctest::Approx(0.5));
    CHECK(c.w[0] == doctest::Approx(0.5));
  }
  for (int j = 0; j <= proc.intervals(); ++j)
    CHECK(proc.y0(j) == doctest::Approx(proc.grid[j] / 2.0));
  proc.validate(spec);
  CHECK(proc.layer == Layer::Strict);
}

TEST_CASE("feasible originals embed into strict-sense processes") {
  ProblemSpec spec = builtin::ex51();
  Vector grid = uniform_grid(1.0, 16);
  std::vector<Vector> u(16, Vector::Zero(2));
  std::vector<int> a(16, 0);
  OriginalProcess orig = integrate_original(spec, grid, u, a);
  Process proc = embed_original(spec, orig);
  for (const auto& c : proc.controls) CHECK(c.w0 > 0.0);
  // Cost transports exactly.
  double orig_cost = spec.cost.eval(orig.T, orig.x(16), orig.v(16));
  int P = proc.intervals();
  double emb_cost = spec.cost.eval(proc.y0(P), proc.y(P), proc.nu(P));
  CHECK(emb_cost == doctest::Approx(orig_cost).epsilon(1e-14));
}

TEST_CASE("round trip recovers the unit-control instance") {
  ProblemSpec spec = scalar_spec();
  OriginalProcess orig = constant_control(spec, 1.0, 1.0, 25);
  Process proc = embed_original(spec, orig);
  OriginalProcess back = invert_embedding(spec, proc);
  CHECK(back.T == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& ui : back.u) CHECK(ui[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(orig_distance(back, orig) <= 1e-6);
}

TEST_CASE("impulsive arcs make the inverse undefined") {
  ProblemSpec spec = builtin::ex51();
  Process ref = builtin::ex51_reference(20);
  CHECK_THROWS_WITH_AS(invert_embedding(spec, ref), doctest::Contains("impulsive arc"),
                       InvariantError);
}

TEST_CASE("zero control round trips exactly") {
  ProblemSpec spec = scalar_spec();
  OriginalProcess orig = constant_control(spec, 0.0, 1.0, 20);
  OriginalProcess back = invert_embedding(spec, embed_original(spec, orig));
  CHECK(orig_distance(back, orig) <= 1e-12);
}

TEST_CASE("randomized smooth round trips stay within 5x mesh") {
  // Two-state instance with polynomial fields, degrees 1 and 2.
  for (int d : {1, 2}) {
    std::string text = R"(
[dynamics]
n = 2
m = 1
d = )" + std::to_string(d) +
                       R"(
drift = poly(0.2*x2; -0.1*x1)
g k=1 j=1 field=const(1,0)
)" + (d == 2 ? "g k=2 j=1,1 field=poly(0; 0.3)\n" : "") +
                       R"(
[constraint]
h = -1
[target]
box t = 1 1
[cost]
psi = x1 + v
[init]
x0 = 0.5 -0.2
[horizon]
bound = 4
)";
    ProblemSpec spec = parse_problem(text, "rand");
    std::mt19937_64 rng(42 + d);
    std::uniform_real_distribution<double> coef(-0.6, 0.6);
    for (int trial = 0; trial < 10; ++trial) {
      const int M = 50;
      double mesh = 1.0 / M;
      Vector grid = uniform_grid(1.0, M);
      double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng);
      std::vector<Vector> u(M);
      std::vector<int> a(M, 0);
      for (int i = 0; i < M; ++i) {
        double t = 0.5 * (grid[i] + grid[i + 1]);
        u[i] = Vector::Constant(1, c0 + c1 * t + c2 * t * t);
      }
      OriginalProcess orig = integrate_original(spec, grid, u, a);
      Process emb = embed_original(spec, orig, 4 * M);
      OriginalProcess back = invert_embedding(spec, emb, 1e-6, M);
      CHECK(orig_distance(back, orig) <= 5.0 * mesh);
      // Exact cost invariance.
      double co = spec.cost.eval(orig.T, orig.x(M), orig.v(M));
      int P = emb.intervals();
      double ce = spec.cost.eval(emb.y0(P), emb.y(P), emb.nu(P));
      CHECK(std::abs(co - ce) <= 1e-12);
    }
  }
}

TEST_CASE("free-time rescaling") {
  ProblemSpec spec = scalar_spec();
  OriginalProcess orig = constant_control(spec, 1.0, 1.0, 20);
  Process proc = embed_original(spec, orig);  // S = 2

  SUBCASE("identity at S = S_bar") {
    RescaledProcess rp = rescale_free_time(2.0, proc);
    CHECK(rp.zeta == doctest::Approx(0.0));
    CHECK(rp.traj(rp.grid.size() - 1, 0) == doctest::Approx(2.0));
  }
  SUBCASE("affine map arithmetic") {
    RescaledProcess rp = rescale_free_time(2.0 / 1.1, proc, 0.25);
    CHECK(rp.zeta == doctest::Approx(0.1));
    // y*(S_bar) = S.
    CHECK(rp.traj(rp.grid.size() - 1, 0) == doctest::Approx(2.0));
  }
  SUBCASE("range error past delta_bar") {
    CHECK_THROWS_AS(rescale_free_time(1.0, proc, 0.5), ParameterError);
  }
}
