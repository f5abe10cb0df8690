#include "gapcert/embed.hpp"

#include <cmath>

#include "gapcert/integrate.hpp"

namespace gapcert {

namespace {

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Piecewise-linear value of a node table at query point, exact at the nodes
// and clamped outside.
double interp(const Vector& xs, const Vector& ys, double x) {
  const int n = static_cast<int>(xs.size());
  if (x <= xs[0]) return ys[0];
  if (x >= xs[n - 1]) return ys[n - 1];
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (xs[mid] <= x ? lo : hi) = mid;
  }
  if (x == xs[lo]) return ys[lo];
  double f = (x - xs[lo]) / (xs[lo + 1] - xs[lo]);
  return ys[lo] + f * (ys[lo + 1] - ys[lo]);
}

// Index of the interval of `grid` containing x (clamped).
int locate(const Vector& grid, double x) {
  const int n = static_cast<int>(grid.size());
  if (x <= grid[0]) return 0;
  if (x >= grid[n - 1]) return n - 2;
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (grid[mid] <= x ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

void OriginalProcess::validate(const ProblemSpec& spec) const {
  const int M = intervals();
  if (M < 1) throw InvariantError("original process: needs at least one interval");
  if (std::abs(grid[0]) > 1e-12) throw InvariantError("original process: grid must start at 0");
  for (int i = 0; i < M; ++i)
    if (grid[i + 1] <= grid[i])
      throw InvariantError("original process: grid not strictly increasing");
  if (static_cast<int>(u.size()) != M || static_cast<int>(a_index.size()) != M)
    throw InvariantError("original process: one control and parameter per interval");
  for (const Vector& ui : u) {
    if (static_cast<int>(ui.size()) != spec.m())
      throw InvariantError("original process: control needs m entries");
    if (!spec.cone.contains(ui, 1e-9))
      throw InvariantError("original process: control outside cone U");
  }
  if (traj.rows() != M + 1 || traj.cols() != spec.n() + 1)
    throw InvariantError("original process: trajectory shape mismatch");
  if (std::abs(v(0)) > 1e-12) throw InvariantError("original process: v(0) must vanish");
  for (int i = 0; i < M; ++i)
    if (v(i + 1) < v(i) - 1e-10) throw InvariantError("original process: v must be nondecreasing");
}

double TimeChange::sigma(double t) const { return interp(t_nodes, s_nodes, t); }

double TimeChange::inverse(double s) const { return interp(s_nodes, t_nodes, s); }

TimeChange TimeChange::from_original(const OriginalProcess& orig) {
  TimeChange tc;
  tc.t_nodes = orig.grid;
  tc.s_nodes.resize(orig.grid.size());
  for (int i = 0; i < orig.grid.size(); ++i) tc.s_nodes[i] = orig.grid[i] + orig.v(i);
  for (int i = 0; i + 1 < tc.s_nodes.size(); ++i)
    if (tc.s_nodes[i + 1] <= tc.s_nodes[i])
      throw InvariantError("time change: sigma not strictly increasing (v decreases)");
  return tc;
}

OriginalProcess integrate_original(const ProblemSpec& spec, const Vector& grid,
                                   const std::vector<Vector>& u, const std::vector<int>& a_index,
                                   int substeps) {
  const int M = static_cast<int>(grid.size()) - 1;
  if (static_cast<int>(u.size()) != M || static_cast<int>(a_index.size()) != M)
    throw ParameterError("integrate_original: need one control per interval");
  OriginalProcess orig;
  orig.grid = grid;
  orig.T = grid[M];
  orig.u = u;
  orig.a_index = a_index;
  orig.traj.resize(M + 1, spec.n() + 1);

  // The original system is F with (w0, w) = (1, u): real time advances at
  // unit rate and nu integrates |u|^d.
  DynamicsEvaluator ev(spec);
  double t = 0.0, v = 0.0;
  Vector x = spec.x0;
  orig.traj.row(0).head(spec.n()) = x.transpose();
  orig.traj(0, spec.n()) = 0.0;
  for (int i = 0; i < M; ++i) {
    ev.advance(grid[i + 1] - grid[i], 1.0, u[i], a_index[i], t, x, v, substeps);
    if (!x.allFinite()) throw NumericError("original integration blow-up");
    orig.traj.row(i + 1).head(spec.n()) = x.transpose();
    orig.traj(i + 1, spec.n()) = v;
  }
  return orig;
}

Process embed_original(const ProblemSpec& spec, const OriginalProcess& orig, int nodes) {
  orig.validate(spec);
  TimeChange tc = TimeChange::from_original(orig);
  const int M = orig.intervals();
  const int P = nodes > 0 ? nodes : 2 * M;
  const int d = spec.d();
  const double S = tc.s_nodes[M];

  Process proc;
  proc.layer = Layer::Strict;
  proc.grid = uniform_grid(S, P);
  proc.controls.resize(P);
  proc.traj.resize(P + 1, 2 + spec.n());

  // Trajectory transport (id, x, v) o sigma^{-1}; endpoints map exactly.
  for (int j = 0; j <= P; ++j) {
    double tau = (j == P) ? orig.T : tc.inverse(proc.grid[j]);
    proc.traj(j, 0) = tau;
    for (int c = 0; c < spec.n(); ++c)
      proc.traj(j, 1 + c) = interp(orig.grid, orig.traj.col(c), tau);
    proc.traj(j, 1 + spec.n()) = interp(orig.grid, orig.traj.col(spec.n()), tau);
  }
  proc.traj(P, 0) = orig.T;
  proc.traj.row(P).segment(1, spec.n()) = orig.traj.row(M).head(spec.n());
  proc.traj(P, 1 + spec.n()) = orig.v(M);

  for (int j = 0; j < P; ++j) {
    double s_mid = 0.5 * (proc.grid[j] + proc.grid[j + 1]);
    int i = locate(orig.grid, tc.inverse(s_mid));
    const Vector& ui = orig.u[i];
    double scale = std::pow(1.0 + pow_int(ui.norm(), d), -1.0 / d);
    proc.controls[j].w0 = scale;
    proc.controls[j].w = scale * ui;
    proc.controls[j].a_index = orig.a_index[i];
  }
  return proc;
}

OriginalProcess invert_embedding(const ProblemSpec& spec, const Process& proc, double w0_min,
                                 int nodes) {
  if (w0_min <= 0.0) throw ParameterError("invert_embedding: w0_min must be positive");
  const int P = proc.intervals();
  for (int j = 0; j < P; ++j)
    if (proc.controls.at(j).w0 < w0_min)
      throw InvariantError("impulsive arc: w0 < w0_min on interval " + std::to_string(j) +
                           ", inverse undefined");

  const int M = nodes > 0 ? nodes : P;
  const double T = proc.y0(P);
  if (T <= 0.0) throw InvariantError("invert_embedding: y0(S) must be positive");

  OriginalProcess orig;
  orig.T = T;
  orig.grid = uniform_grid(T, M);
  orig.u.resize(M);
  orig.a_index.resize(M);
  orig.traj.resize(M + 1, spec.n() + 1);

  // Table s = y0^{-1}(t) from the stored nodes.
  Vector y0_nodes(P + 1);
  for (int j = 0; j <= P; ++j) y0_nodes[j] = proc.y0(j);

  for (int i = 0; i <= M; ++i) {
    double t = orig.grid[i];
    double s = (i == M) ? proc.grid[P] : interp(y0_nodes, proc.grid, t);
    for (int c = 0; c < spec.n(); ++c)
      orig.traj(i, c) = interp(proc.grid, proc.traj.col(1 + c), s);
    orig.traj(i, spec.n()) = interp(proc.grid, proc.traj.col(1 + spec.n()), s);
  }
  orig.traj.row(M).head(spec.n()) = proc.traj.row(P).segment(1, spec.n());
  orig.traj(M, spec.n()) = proc.nu(P);

  for (int i = 0; i < M; ++i) {
    double t_mid = 0.5 * (orig.grid[i] + orig.grid[i + 1]);
    double s_mid = interp(y0_nodes, proc.grid, t_mid);
    const auto& c = proc.controls[locate(proc.grid, s_mid)];
    orig.u[i] = c.w / c.w0;
    orig.a_index[i] = c.a_index;
  }
  return orig;
}

RescaledProcess rescale_free_time(double S_bar, const Process& proc, double delta_bar) {
  if (S_bar <= 0.0) throw ParameterError("rescale_free_time: S_bar must be positive");
  if (delta_bar <= 0.0 || delta_bar > 0.5)
    throw ParameterError("rescale_free_time: delta_bar must lie in (0, 1/2]");
  const double S = proc.S();
  const double zeta = S / S_bar - 1.0;
  if (std::abs(zeta) > delta_bar)
    throw ParameterError("rescale_free_time: |S - S_bar|/S_bar = " + std::to_string(std::abs(zeta)) +
                         " exceeds delta_bar");
  const int N = proc.intervals();
  RescaledProcess rp;
  rp.S_bar = S_bar;
  rp.zeta = zeta;
  rp.grid = uniform_grid(S_bar, N);
  rp.traj.resize(N + 1, 1 + proc.traj.cols());
  for (int i = 0; i <= N; ++i) {
    double s = rp.grid[i];
    double mapped = (1.0 + zeta) * s;
    rp.traj(i, 0) = mapped;  // y*(s)
    for (int c = 0; c < proc.traj.cols(); ++c)
      rp.traj(i, 1 + c) = interp(proc.grid, proc.traj.col(c), mapped);
  }
  // Endpoint carries (S, original endpoint) exactly.
  rp.traj(N, 0) = S;
  rp.traj.row(N).tail(proc.traj.cols()) = proc.traj.row(N);
  return rp;
}

}  // namespace gapcert
