#include "gapcert/integrate.hpp"

#include <cmath>
#include <string>

namespace gapcert {

namespace {

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

DynamicsEvaluator::DynamicsEvaluator(const ProblemSpec& spec) : spec_(&spec) {
  for (int i = 0; i < spec.num_params(); ++i) params_.push_back(spec.param(i));
  const int n = spec.n();
  tmp_.resize(n);
  tmp2_.resize(n);
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  ytmp_.resize(n);
}

void DynamicsEvaluator::eval(double t, const Vector& x, double w0, const Vector& w, int a_idx,
                             VecRef out) {
  const auto& dyn = spec_->dyn;
  const Vector& a = params_[a_idx];
  dyn.drift.eval_scratch(vals_, t, x, a, out);
  double drift_w = pow_int(w0, dyn.d);
  out *= drift_w;
  for (const auto& [mi, field] : dyn.coeffs) {
    double mono = pow_int(w0, dyn.d - mi.k);
    for (int jl : mi.j) mono *= w[jl - 1];
    if (mono == 0.0) continue;
    field.eval_scratch(vals_, t, x, a, tmp_);
    out += mono * tmp_;
  }
}

void DynamicsEvaluator::advance(double len, double w0, const Vector& w, int a_idx, double& y0,
                                Vector& y, double& nu, int substeps) {
  const int d = spec_->d();
  const double y0dot = pow_int(w0, d);
  const double nudot = pow_int(w.norm(), d);
  const double h = len / substeps;
  for (int s = 0; s < substeps; ++s) {
    const double t0 = y0;
    const double tm = y0 + 0.5 * h * y0dot;
    const double t1 = y0 + h * y0dot;
    eval(t0, y, w0, w, a_idx, k1_);
    ytmp_ = y + (0.5 * h) * k1_;
    eval(tm, ytmp_, w0, w, a_idx, k2_);
    ytmp_ = y + (0.5 * h) * k2_;
    eval(tm, ytmp_, w0, w, a_idx, k3_);
    ytmp_ = y + h * k3_;
    eval(t1, ytmp_, w0, w, a_idx, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    y0 = t1;
    nu += h * nudot;
  }
}

void DynamicsEvaluator::eval_relaxed(double t, const Vector& x, const SimplexControlRow& row,
                                     VecRef out) {
  out.setZero();
  for (size_t k = 0; k < row.rows.size(); ++k) {
    double lk = row.lambda[static_cast<int>(k)];
    if (lk == 0.0) continue;
    const auto& smp = row.rows[k];
    eval(t, x, smp.w0, smp.w, smp.a_index, tmp2_);
    out += lk * tmp2_;
  }
}

void DynamicsEvaluator::advance_relaxed(double len, const SimplexControlRow& row, double& y0,
                                        Vector& y, double& nu, VecRef xi, int substeps) {
  const int d = spec_->d();
  double y0dot = 0.0, nudot = 0.0;
  for (size_t k = 0; k < row.rows.size(); ++k) {
    double lk = row.lambda[static_cast<int>(k)];
    y0dot += lk * pow_int(row.rows[k].w0, d);
    nudot += lk * pow_int(row.rows[k].w.norm(), d);
  }
  const double h = len / substeps;
  for (int s = 0; s < substeps; ++s) {
    const double t0 = y0;
    const double tm = y0 + 0.5 * h * y0dot;
    const double t1 = y0 + h * y0dot;
    eval_relaxed(t0, y, row, k1_);
    ytmp_ = y + (0.5 * h) * k1_;
    eval_relaxed(tm, ytmp_, row, k2_);
    ytmp_ = y + (0.5 * h) * k2_;
    eval_relaxed(tm, ytmp_, row, k3_);
    ytmp_ = y + h * k3_;
    eval_relaxed(t1, ytmp_, row, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    y0 = t1;
    nu += h * nudot;
  }
  xi += len * row.lambda;
}

Process integrate_extended(const ProblemSpec& spec, const Vector& grid,
                           const std::vector<SpaceTimeControlSample>& controls, Layer layer,
                           const IntegratorOptions& opts) {
  const int N = static_cast<int>(grid.size()) - 1;
  if (static_cast<int>(controls.size()) != N)
    throw ParameterError("integrate_extended: need one control per interval");
  Process proc;
  proc.layer = layer;
  proc.grid = grid;
  proc.controls = controls;
  proc.traj.resize(N + 1, 2 + spec.n());

  DynamicsEvaluator ev(spec);
  double y0 = 0.0, nu = 0.0;
  Vector y = spec.x0;
  proc.traj(0, 0) = 0.0;
  proc.traj.row(0).segment(1, spec.n()) = y.transpose();
  proc.traj(0, 1 + spec.n()) = 0.0;
  for (int i = 0; i < N; ++i) {
    ev.advance(grid[i + 1] - grid[i], controls[i].w0, controls[i].w, controls[i].a_index, y0, y,
               nu, opts.substeps);
    if (!y.allFinite() || !std::isfinite(y0) || !std::isfinite(nu))
      throw NumericError("integration blow-up on interval " + std::to_string(i));
    proc.traj(i + 1, 0) = y0;
    proc.traj.row(i + 1).segment(1, spec.n()) = y.transpose();
    proc.traj(i + 1, 1 + spec.n()) = nu;
  }
  return proc;
}

double dynamics_residual(const ProblemSpec& spec, const Process& proc,
                         const IntegratorOptions& opts) {
  DynamicsEvaluator ev(spec);
  const int N = proc.intervals();
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    double y0 = proc.y0(i), nu = proc.nu(i);
    Vector y = proc.y(i);
    Vector xi;
    if (proc.layer == Layer::Relaxed) {
      xi = proc.xi.row(i).transpose();
      ev.advance_relaxed(proc.grid[i + 1] - proc.grid[i], proc.simplex[i], y0, y, nu, xi,
                         opts.substeps);
    } else {
      const auto& c = proc.controls[i];
      ev.advance(proc.grid[i + 1] - proc.grid[i], c.w0, c.w, c.a_index, y0, y, nu, opts.substeps);
    }
    double defect = std::abs(y0 - proc.y0(i + 1));
    defect = std::max(defect, (y - proc.y(i + 1)).cwiseAbs().maxCoeff());
    defect = std::max(defect, std::abs(nu - proc.nu(i + 1)));
    worst = std::max(worst, defect);
  }
  return worst;
}

Vector uniform_grid(double S, int N) {
  if (N < 1 || S <= 0.0) throw ParameterError("uniform_grid: need N >= 1, S > 0");
  Vector g(N + 1);
  for (int i = 0; i <= N; ++i) g[i] = S * static_cast<double>(i) / N;
  g[N] = S;
  return g;
}

}  // namespace gapcert
