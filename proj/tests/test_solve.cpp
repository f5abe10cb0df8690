#include "gapcert/solve.hpp"

#include <random>

#include "doctest.h"
#include "gapcert/builtin.hpp"

using namespace gapcert;

TEST_CASE("transcription layout counts") {
  ProblemSpec spec = builtin::ex51();

  TranscriptionOptions ext;
  ext.layer = Layer::Extended;
  ext.N = 40;
  Transcription te = transcribe(spec, ext);
  CHECK(te.dim() == 1 + 40 * 2);

  TranscriptionOptions strict = ext;
  strict.layer = Layer::Strict;
  strict.w0_floor = 0.1;
  Transcription ts = transcribe(spec, strict);
  CHECK(ts.dim() == te.dim());  // layout containment: same variables, tighter box

  TranscriptionOptions rel = ext;
  rel.layer = Layer::Relaxed;
  Transcription tr = transcribe(spec, rel);
  CHECK(tr.dim() == 1 + 40 * (4 * 2 + 3));
  CHECK(tr.samples_per_interval() == 4);

  TranscriptionOptions toosmall = ext;
  toosmall.N = 4;
  CHECK_THROWS_AS(transcribe(spec, toosmall), ParameterError);
}

TEST_CASE("pack/unpack round-trips the decision vector") {
  ProblemSpec spec = builtin::ex51();
  TranscriptionOptions opts;
  opts.layer = Layer::Extended;
  opts.N = 10;
  Transcription trans = transcribe(spec, opts);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Vector x(trans.dim());
  for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
  x[0] = 1.7;
  Process proc = trans.unpack(x);
  Vector back = trans.pack(proc);
  CHECK((back - x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("objective gradient matches a centered-difference oracle") {
  ProblemSpec spec = builtin::ex51();
  TranscriptionOptions opts;
  opts.layer = Layer::Extended;
  opts.N = 8;
  Transcription trans = transcribe(spec, opts);
  DynamicsEvaluator ev(spec);
  Transcription::Eval eval;

  auto objective = [&](const Vector& x) {
    trans.evaluate(x, eval, ev);
    return eval.objective;
  };

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(trans.dim());
    for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
    x[0] = 1.5 + 0.5 * u(rng);
    double f0 = objective(x);
    Vector gf(x.size()), gc(x.size());
    for (int i = 0; i < x.size(); ++i) {
      double hf = 1e-6 * std::max(1.0, std::abs(x[i]));
      Vector xp = x;
      xp[i] += hf;
      gf[i] = (objective(xp) - f0) / hf;
      double hc = 1e-4 * std::max(1.0, std::abs(x[i]));
      Vector xc1 = x, xc2 = x;
      xc1[i] += hc;
      xc2[i] -= hc;
      gc[i] = (objective(xc1) - objective(xc2)) / (2 * hc);
    }
    double denom = std::max(gc.norm(), 1e-6);
    CHECK((gf - gc).norm() / denom <= 1e-3);
  }
}

TEST_CASE("LQ reach instance solves to zero cost") {
  ProblemSpec spec = builtin::lq();
  TranscriptionOptions opts;
  opts.layer = Layer::Strict;
  opts.w0_floor = 0.5;  // |u| <= 1 in original coordinates
  opts.N = 20;
  Transcription trans = transcribe(spec, opts);
  SolverOptions sopts;
  SolveReport rep = solve_nlp(trans, nullptr, sopts);
  CHECK(rep.violation <= 1e-5);
  CHECK(rep.objective <= 1e-4);
  CHECK(rep.objective >= -1e-12);

  // Feasible-start monotonicity of the reported outer merit.
  for (size_t i = 1; i < rep.outer_violation.size(); ++i)
    CHECK(rep.outer_violation[i] <= rep.outer_violation[i - 1] + 1e-15);
}

TEST_CASE("multistart count=1 equals the default solve") {
  ProblemSpec spec = builtin::lq();
  TranscriptionOptions opts;
  opts.layer = Layer::Extended;
  opts.N = 12;
  Transcription trans = transcribe(spec, opts);
  SolverOptions sopts;
  SolveReport a = solve_nlp(trans, nullptr, sopts);
  SolveReport b = multistart(trans, 1, 99, sopts);
  CHECK(a.objective == b.objective);
  CHECK(a.violation == b.violation);
}

TEST_CASE("multistart is deterministic for a fixed seed") {
  ProblemSpec spec = builtin::lq();
  TranscriptionOptions opts;
  opts.layer = Layer::Strict;
  opts.w0_floor = 0.5;
  opts.N = 12;
  Transcription trans = transcribe(spec, opts);
  SolverOptions sopts;
  SolveReport a = multistart(trans, 4, 2024, sopts);
  SolveReport b = multistart(trans, 4, 2024, sopts);
  CHECK(a.objective == b.objective);
  CHECK((a.best.traj - b.best.traj).cwiseAbs().maxCoeff() == 0.0);
  // Convex instance: multistart matches the single solve.
  SolveReport c = solve_nlp(trans, nullptr, sopts);
  CHECK(std::abs(a.objective - c.objective) <= 1e-4);
}

TEST_CASE("infeasible target is detected") {
  // Target requires y0(S) = 1 and nu(S) <= K with K tiny: x must travel a
  // unit but has no budget.
  ProblemSpec spec = parse_problem(R"(
[dynamics]
n = 1
m = 1
d = 1
g k=1 j=1 field=const(1)
[constraint]
h = -1
[target]
box t = 1 1
box x1 = 1 2
[cost]
psi = x1
[budget]
K = 0.05
[init]
x0 = 0
[horizon]
bound = 3
)",
                                   "infeas");
  TranscriptionOptions opts;
  opts.layer = Layer::Extended;
  opts.N = 10;
  Transcription trans = transcribe(spec, opts);
  SolverOptions sopts;
  sopts.max_outer = 6;
  SolveReport rep = solve_nlp(trans, nullptr, sopts);
  CHECK(rep.status == SolveReport::Status::Infeasible);
  CHECK(rep.violation >= 0.1);
}

TEST_CASE("ex51 extended mini-solve approaches the known optimum") {
  ProblemSpec spec = builtin::ex51();
  TranscriptionOptions opts;
  opts.layer = Layer::Extended;
  opts.N = 16;
  Transcription trans = transcribe(spec, opts);
  SolverOptions sopts;
  SolveReport rep = multistart(trans, 2, 5, sopts);
  CHECK(rep.violation <= 1e-4);
  CHECK(std::abs(rep.objective) <= 0.05);
}
