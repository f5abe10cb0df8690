#include "gapcert/relax.hpp"

#include <algorithm>
#include <cmath>

#include "gapcert/integrate.hpp"

namespace gapcert {

namespace {

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

void ChatterSchedule::validate(const Process& relaxed, double tol) const {
  if (pieces.empty()) throw InvariantError("chatter schedule: empty");
  double prev = 0.0;
  for (const auto& p : pieces) {
    if (p.s0 < prev - tol || p.s1 < p.s0 - tol)
      throw InvariantError("chatter schedule: pieces not contiguous");
    prev = p.s1;
  }
  if (std::abs(prev - relaxed.S()) > tol)
    throw InvariantError("chatter schedule: does not cover [0,S]");
}

Process integrate_relaxed(const ProblemSpec& spec, const std::vector<SimplexControlRow>& rows,
                          const Vector& grid, int substeps) {
  const int N = static_cast<int>(grid.size()) - 1;
  if (static_cast<int>(rows.size()) != N)
    throw ParameterError("integrate_relaxed: need one simplex row per interval");
  for (int i = 0; i < N; ++i) {
    try {
      rows[i].validate(spec);
    } catch (const InvariantError& e) {
      throw InvariantError("interval " + std::to_string(i) + ": " + e.what());
    }
  }

  Process proc;
  proc.layer = Layer::Relaxed;
  proc.grid = grid;
  proc.simplex = rows;
  proc.traj.resize(N + 1, 2 + spec.n());
  proc.xi = Matrix::Zero(N + 1, spec.n() + 1);

  DynamicsEvaluator ev(spec);
  double y0 = 0.0, nu = 0.0;
  Vector y = spec.x0;
  Vector xi = Vector::Zero(spec.n() + 1);
  proc.traj(0, 0) = 0.0;
  proc.traj.row(0).segment(1, spec.n()) = y.transpose();
  proc.traj(0, 1 + spec.n()) = 0.0;
  for (int i = 0; i < N; ++i) {
    ev.advance_relaxed(grid[i + 1] - grid[i], rows[i], y0, y, nu, xi, substeps);
    if (!y.allFinite())
      throw NumericError("relaxed integration blow-up on interval " + std::to_string(i));
    proc.traj(i + 1, 0) = y0;
    proc.traj.row(i + 1).segment(1, spec.n()) = y.transpose();
    proc.traj(i + 1, 1 + spec.n()) = nu;
    proc.xi.row(i + 1) = xi.transpose();
  }
  return proc;
}

ChatterSchedule make_chatter_schedule(const Process& relaxed, double eta) {
  if (relaxed.layer != Layer::Relaxed)
    throw ParameterError("chatter: input must be a relaxed-layer process");
  const double S = relaxed.S();
  if (eta <= 0.0 || eta > S / 4.0)
    throw ParameterError("chatter: eta must lie in (0, S/4]");
  const int rows = static_cast<int>(relaxed.simplex.front().lambda.size());
  const int slices = static_cast<int>(std::ceil(S / eta - 1e-12));

  ChatterSchedule sched;
  sched.eta = eta;
  for (int sl = 0; sl < slices; ++sl) {
    double a = sl * eta;
    double b = std::min(S, a + eta);
    double len = b - a;
    if (len <= 0.0) break;
    // Slice average of lambda over the piecewise-constant rows.
    Vector avg = Vector::Zero(rows);
    for (int i = 0; i < relaxed.intervals(); ++i) {
      double lo = std::max(a, relaxed.grid[i]);
      double hi = std::min(b, relaxed.grid[i + 1]);
      if (hi > lo) avg += (hi - lo) * relaxed.simplex[i].lambda;
    }
    avg /= len;
    double cursor = a;
    for (int k = 0; k < rows; ++k) {
      double dur = (k == rows - 1) ? (b - cursor) : avg[k] * len;
      if (dur <= 1e-15) continue;
      sched.pieces.push_back({cursor, std::min(cursor + dur, b), k});
      cursor = std::min(cursor + dur, b);
    }
    if (!sched.pieces.empty()) sched.pieces.back().s1 = b;
  }
  return sched;
}

Process chatter(const ProblemSpec& spec, const Process& relaxed, double eta, int substeps) {
  ChatterSchedule sched = make_chatter_schedule(relaxed, eta);

  // Refine pieces by the underlying grid so controls stay interval-constant.
  std::vector<double> cuts;
  std::vector<SpaceTimeControlSample> controls;
  for (const auto& piece : sched.pieces) {
    double a = piece.s0;
    while (a < piece.s1 - 1e-14) {
      // Locate the relaxed interval containing a.
      int i = std::min<int>(relaxed.intervals() - 1,
                            static_cast<int>(std::upper_bound(relaxed.grid.data(),
                                                              relaxed.grid.data() + relaxed.grid.size(),
                                                              a + 1e-14) -
                                             relaxed.grid.data()) -
                                1);
      double b = std::min(piece.s1, relaxed.grid[i + 1]);
      if (b <= a + 1e-14) break;
      cuts.push_back(a);
      controls.push_back(relaxed.simplex[i].rows[piece.row]);
      a = b;
    }
  }
  cuts.push_back(relaxed.S());

  Vector grid(cuts.size());
  for (size_t i = 0; i < cuts.size(); ++i) grid[static_cast<int>(i)] = cuts[i];
  return integrate_extended(spec, grid, controls, Layer::Extended, {substeps});
}

InnerApproxResult inner_approximate(const ProblemSpec& spec, const Process& ext, double w0_floor,
                                    int substeps) {
  if (w0_floor <= 0.0 || w0_floor >= 1.0)
    throw ParameterError("inner_approximate: w0_floor must lie in (0,1)");
  if (ext.layer == Layer::Relaxed)
    throw ParameterError("inner_approximate: input must be strict or extended layer");
  const int d = spec.d();
  std::vector<SpaceTimeControlSample> controls = ext.controls;
  for (size_t i = 0; i < controls.size(); ++i) {
    auto& c = controls[i];
    if (c.w0 >= w0_floor) continue;
    double wn = c.w.norm();
    if (wn <= 1e-14)
      throw NumericError("inner_approximate: degenerate sample on interval " + std::to_string(i) +
                         " (w = 0, no direction to renormalize)");
    double mag = std::pow(1.0 - pow_int(w0_floor, d), 1.0 / d);
    c.w *= mag / wn;
    c.w0 = w0_floor;
  }
  InnerApproxResult out;
  out.proc = integrate_extended(spec, ext.grid, controls, Layer::Strict, {substeps});
  out.sup_error =
      (out.proc.traj.middleCols(1, spec.n()) - ext.traj.middleCols(1, spec.n()))
          .cwiseAbs()
          .maxCoeff();
  return out;
}

}  // namespace gapcert
