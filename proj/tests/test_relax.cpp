#include "gapcert/relax.hpp"

#include <random>

#include "doctest.h"
#include "gapcert/builtin.hpp"
#include "gapcert/integrate.hpp"

using namespace gapcert;

namespace {

// Scalar system ydot = w as a one-state problem.
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

SpaceTimeControlSample sample1(double w) {
  SpaceTimeControlSample s;
  s.w = Vector::Constant(1, w);
  s.w0 = 1.0 - std::abs(w);
  return s;
}

// rows (+1, -1) with weights (1/2, 1/2): relaxed velocity 0.
std::vector<SimplexControlRow> pm_rows(int N) {
  SimplexControlRow row;
  row.rows = {sample1(1.0), sample1(-1.0)};
  row.lambda = Vector::Constant(2, 0.5);
  return std::vector<SimplexControlRow>(N, row);
}

}  // namespace

TEST_CASE("vertex weight reproduces the extended flow") {
  ProblemSpec spec = builtin::ex51();
  Process ext = builtin::ex51_reference(40);
  std::vector<SimplexControlRow> rows(ext.intervals());
  for (int i = 0; i < ext.intervals(); ++i) {
    rows[i].lambda = Vector::Zero(4);
    rows[i].lambda[2] = 1.0;  // e^2: the active row sits at index 2
    SpaceTimeControlSample filler;
    filler.w0 = 1.0;
    filler.w = Vector::Zero(2);
    rows[i].rows.assign(4, filler);
    rows[i].rows[2] = ext.controls[i];
  }
  Process rel = integrate_relaxed(spec, rows, ext.grid);
  CHECK((rel.traj - ext.traj).cwiseAbs().maxCoeff() <= 1e-12);
  // xi bookkeeping: components sum to S.
  CHECK(rel.xi.row(rel.intervals()).sum() == doctest::Approx(rel.S()).epsilon(1e-12));
}

TEST_CASE("symmetric average freezes the state") {
  ProblemSpec spec = scalar_spec();
  Process rel = integrate_relaxed(spec, pm_rows(20), uniform_grid(1.0, 20));
  CHECK(rel.traj.col(1).cwiseAbs().maxCoeff() <= 1e-14);
  // nu still integrates |w| = 1.
  CHECK(rel.nu(20) == doctest::Approx(1.0));
}

TEST_CASE("ex51 reference encoded with vertex weights reproduces the paper trajectory") {
  ProblemSpec spec = builtin::ex51();
  Process ext = builtin::ex51_reference(100);
  std::vector<SimplexControlRow> rows(ext.intervals());
  for (int i = 0; i < ext.intervals(); ++i) {
    rows[i].lambda = Vector::Zero(4);
    rows[i].lambda[0] = 1.0;
    rows[i].rows.assign(4, ext.controls[i]);
  }
  Process rel = integrate_relaxed(spec, rows, ext.grid);
  Matrix exact = builtin::ex51_reference_exact(ext.grid);
  CHECK((rel.traj - exact).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("chatter schedule structure") {
  ProblemSpec spec = scalar_spec();
  Process rel = integrate_relaxed(spec, pm_rows(20), uniform_grid(1.0, 20));
  ChatterSchedule sched = make_chatter_schedule(rel, 0.1);
  sched.validate(rel);
  // Per slice: half the width on row 0, half on row 1.
  CHECK(sched.pieces.size() == 20);
  CHECK(sched.pieces[0].s1 - sched.pieces[0].s0 == doctest::Approx(0.05));
}

TEST_CASE("pm-average chatter meets the analytic eta/2 bound") {
  ProblemSpec spec = scalar_spec();
  Process rel = integrate_relaxed(spec, pm_rows(20), uniform_grid(1.0, 20));
  Process ext = chatter(spec, rel, 0.1);
  CHECK(ext.layer == Layer::Extended);
  double sup = ext.traj.col(1).cwiseAbs().maxCoeff();
  CHECK(sup <= 0.05 + 1e-12);
  CHECK(sup >= 0.04);  // the sawtooth really reaches ~eta/2
}

TEST_CASE("vertex weights chatter to the exact row process") {
  ProblemSpec spec = builtin::ex51();
  Process ext = builtin::ex51_reference(40);
  std::vector<SimplexControlRow> rows(ext.intervals());
  for (int i = 0; i < ext.intervals(); ++i) {
    rows[i].lambda = Vector::Zero(4);
    rows[i].lambda[1] = 1.0;
    rows[i].rows.assign(4, ext.controls[i]);
  }
  Process rel = integrate_relaxed(spec, rows, ext.grid);
  Process chat = chatter(spec, rel, 0.25);
  // Node values at the reference nodes agree to integrator precision.
  for (int i = 0; i <= ext.intervals(); ++i) {
    double s = ext.grid[i];
    int j = 0;
    while (j < chat.intervals() && chat.grid[j + 1] <= s + 1e-12) ++j;
    if (std::abs(chat.grid[j] - s) > 1e-12) continue;
    CHECK((chat.traj.row(j) - ext.traj.row(i)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("chatter error halves with eta") {
  // Randomized two-row instances; ratio of sup errors in [1.6, 2.5].
  ProblemSpec spec = parse_problem(R"(
[dynamics]
n = 2
m = 1
d = 1
drift = poly(0.3*x2; -0.2*x1)
g k=1 j=1 field=poly(1; 0.5*x1)
[constraint]
h = -1
[target]
box t = 1 1
[cost]
psi = x1
[init]
x0 = 0.4 0.1
[horizon]
bound = 3
)",
                                   "chat2");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mix(0.25, 0.75);
  std::uniform_real_distribution<double> wdist(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int N = 16;
    std::vector<SimplexControlRow> rows(N);
    double w_hi = 0.9, w_lo = wdist(rng) * 0.5 - 0.4;
    for (int i = 0; i < N; ++i) {
      double lam = mix(rng);
      rows[i].rows = {sample1(w_hi), sample1(w_lo), sample1(0.0)};
      rows[i].lambda = Vector::Zero(3);
      rows[i].lambda << lam, 1.0 - lam, 0.0;
    }
    Process rel = integrate_relaxed(spec, rows, uniform_grid(1.0, N));
    auto sup_err = [&](double eta) {
      Process chat = chatter(spec, rel, eta);
      double worst = 0.0;
      for (int j = 0; j <= chat.intervals(); ++j) {
        double s = chat.grid[j];
        for (int c = 0; c < 2; ++c) {
          // Piecewise-linear readback of the relaxed trajectory.
          int lo = 0, hi = rel.intervals();
          while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (rel.grid[mid] <= s ? lo : hi) = mid;
          }
          double f = (s - rel.grid[lo]) / (rel.grid[lo + 1] - rel.grid[lo]);
          double ref = rel.traj(lo, 1 + c) + f * (rel.traj(lo + 1, 1 + c) - rel.traj(lo, 1 + c));
          worst = std::max(worst, std::abs(chat.traj(j, 1 + c) - ref));
        }
      }
      return worst;
    };
    double e1 = sup_err(0.0625);
    double e2 = sup_err(0.03125);
    CHECK(e2 > 0.0);
    double ratio = e1 / e2;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.5);
  }
}

TEST_CASE("inner approximation") {
  ProblemSpec spec = builtin::ex51();
  Process ref = builtin::ex51_reference(100);

  SUBCASE("no-op when w0 already above the floor") {
    Process drift = ref;  // all-drift process: w0 = 1 everywhere
    for (auto& c : drift.controls) {
      c.w0 = 1.0;
      c.w.setZero();
    }
    drift = integrate_extended(spec, drift.grid, drift.controls, Layer::Extended);
    InnerApproxResult res = inner_approximate(spec, drift, 0.1);
    CHECK(res.sup_error == doctest::Approx(0.0));
  }

  SUBCASE("renormalization formula at d = 1") {
    InnerApproxResult res = inner_approximate(spec, ref, 0.1);
    // The second-arc samples (0,(-1,0)) become (0.1, (-0.9, 0)).
    const auto& c = res.proc.controls[75];
    CHECK(c.w0 == doctest::Approx(0.1));
    CHECK(c.w[0] == doctest::Approx(-0.9));
    CHECK(c.w[1] == doctest::Approx(0.0));
    res.proc.validate(spec);
    CHECK(res.proc.layer == Layer::Strict);
  }

  SUBCASE("sup error decreases to zero with the floor") {
    double prev = kInf;
    for (double floor : {0.2, 0.1, 0.05}) {
      InnerApproxResult res = inner_approximate(spec, ref, floor);
      CHECK(res.sup_error < prev);
      prev = res.sup_error;
    }
    CHECK(prev <= 0.1);
  }

  SUBCASE("degenerate sample error") {
    Process bad = ref;
    bad.controls[75].w.setZero();
    bad.controls[75].w0 = 0.0;
    CHECK_THROWS_AS(inner_approximate(spec, bad, 0.1), NumericError);
  }
}

TEST_CASE("nu deviation under inner approximation is floor-controlled") {
  ProblemSpec spec = builtin::ex51();
  Process ref = builtin::ex51_reference(100);
  for (double floor : {0.2, 0.1, 0.05}) {
    InnerApproxResult res = inner_approximate(spec, ref, floor);
    int N = ref.intervals();
    CHECK(std::abs(res.proc.nu(N) - ref.nu(N)) <= 2.0 * floor * ref.S());
  }
}
