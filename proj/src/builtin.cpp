#include "gapcert/builtin.hpp"

#include <cmath>

#include "gapcert/integrate.hpp"

namespace gapcert::builtin {

namespace {

const char* kEx51 = R"prob(
name = ex51

[dynamics]
n = 3
m = 2
q = 0
d = 1
drift = poly(0; x2*x3; 0)
g k=1 j=1 field=const(1,0,0)
g k=1 j=2 field=poly(0; -1; -x1)

[cone]
sign = free free

[constraint]
h = x1 - 1

[target]
box t = 1 1
box x1 = -1 0
box x2 = 0 1
box x3 = 0 1

[cost]
psi = -x1

[budget]
K = 2

[init]
x0 = 1 0 0

[horizon]
bound = 3.2
)prob";

const char* kLq = R"prob(
name = lq

[dynamics]
n = 1
m = 1
q = 0
d = 1
g k=1 j=1 field=const(1)

[cone]
sign = free

[constraint]
h = -1

[target]
box t = 1 1

[cost]
psi = x1*x1

[budget]
K = inf

[init]
x0 = 1

[horizon]
bound = 2.5
)prob";

const char* kIsofix = R"prob(
name = isofix

[dynamics]
n = 2
m = 1
q = 0
d = 1
drift = tent(1,2,12)
g k=1 j=1 field=const(1,0)

[cone]
sign = free

[constraint]
h = x2

[target]
box t = 0 0.02
box x1 = 1 inf

[cost]
psi = -x1

[budget]
K = 1.5

[init]
x0 = 0 0

[horizon]
bound = 2.0
)prob";

}  // namespace

std::vector<std::pair<std::string, std::string>> bundled_problems() {
  return {{"ex51", kEx51}, {"lq", kLq}, {"isofix", kIsofix}};
}

std::string problem_text(const std::string& name) {
  for (auto& [n, text] : bundled_problems())
    if (n == name) return text;
  throw ParameterError("no bundled problem named '" + name + "'");
}

ProblemSpec ex51() { return parse_problem(kEx51, "ex51"); }
ProblemSpec lq() { return parse_problem(kLq, "lq"); }
ProblemSpec isofix() { return parse_problem(kIsofix, "isofix"); }

Process ex51_reference(int N) {
  if (N < 2 || N % 2 != 0) throw ParameterError("ex51_reference: N must be even and >= 2");
  ProblemSpec spec = ex51();
  Vector grid = uniform_grid(2.0, N);
  std::vector<SpaceTimeControlSample> controls(N);
  for (int i = 0; i < N; ++i) {
    SpaceTimeControlSample& c = controls[i];
    c.w = Vector::Zero(2);
    double mid = 0.5 * (grid[i] + grid[i + 1]);
    if (mid < 1.0) {
      c.w0 = 1.0;
    } else {
      c.w0 = 0.0;
      c.w[0] = -1.0;
    }
  }
  return integrate_extended(spec, grid, controls, Layer::Extended);
}

Matrix ex51_reference_exact(const Vector& grid) {
  Matrix traj(grid.size(), 5);
  for (int i = 0; i < grid.size(); ++i) {
    double s = grid[i];
    if (s <= 1.0) {
      traj.row(i) << s, 1.0, 0.0, 0.0, 0.0;
    } else {
      traj.row(i) << 1.0, 2.0 - s, 0.0, 0.0, s - 1.0;
    }
  }
  return traj;
}

Process isofix_reference(int N) {
  ProblemSpec spec = isofix();
  Vector grid = uniform_grid(1.0, N);
  std::vector<SpaceTimeControlSample> controls(N);
  for (int i = 0; i < N; ++i) {
    controls[i].w0 = 0.0;
    controls[i].w = Vector::Ones(1);
  }
  return integrate_extended(spec, grid, controls, Layer::Extended);
}

}  // namespace gapcert::builtin
