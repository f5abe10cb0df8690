#include "gapcert/solve.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "gapcert/relax.hpp"

namespace gapcert {

namespace {

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

double interp_col(const Vector& xs, const Eigen::Ref<const Vector>& ys, double x) {
  const int n = static_cast<int>(xs.size());
  if (x <= xs[0]) return ys[0];
  if (x >= xs[n - 1]) return ys[n - 1];
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (xs[mid] <= x ? lo : hi) = mid;
  }
  double f = (x - xs[lo]) / (xs[lo + 1] - xs[lo]);
  return ys[lo] + f * (ys[lo + 1] - ys[lo]);
}

}  // namespace

Transcription::Transcription(const ProblemSpec& spec, TranscriptionOptions opts)
    : spec_(&spec), opts_(opts) {
  if (opts_.N < 8) throw ParameterError("transcribe: N >= 8 required");
  const int n = spec.n(), m = spec.m(), d = spec.d();
  samples_ = opts_.layer == Layer::Relaxed ? n + 1 : 1;
  per_interval_ = samples_ * m + (opts_.layer == Layer::Relaxed ? n : 0);
  dim_ = (opts_.free_horizon ? 1 : 0) + opts_.N * per_interval_;

  if (opts_.layer == Layer::Strict) {
    if (opts_.w0_floor <= 0.0 || opts_.w0_floor >= 1.0)
      throw ParameterError("transcribe: strict layer needs w0_floor in (0,1)");
    double r = std::pow(1.0 - pow_int(opts_.w0_floor, d), 1.0 / d);
    sphere_radius_sq_ = r * r;
  } else {
    sphere_radius_sq_ = 1.0;
  }
  if (!spec.cone.sign_form)
    throw ParameterError("transcribe: ray-form cones are not supported in the transcription");

  if (opts_.probe_mode && opts_.probe_ref == nullptr)
    throw ParameterError("transcribe: probe mode needs a reference process");

  s_lo_ = opts_.min_horizon_frac * spec.horizon;
  s_hi_ = spec.horizon;

  // Constraint count (order documented in the header).
  int cone_rows = 0;
  for (auto s : spec.cone.sign)
    if (s != ControlCone::Sign::Free) ++cone_rows;
  ncons_ = 0;
  if (!opts_.probe_mode) {
    ncons_ += opts_.N + 1;                                  // h at nodes
    ncons_ += std::isfinite(spec.budget) ? 1 : 0;           // budget
    ncons_ += static_cast<int>(spec.target.C.rows());       // target rows
  }
  ncons_ += opts_.N * samples_;                             // sphere rows
  if (opts_.layer == Layer::Relaxed) ncons_ += opts_.N * (n + 1);  // simplex rows
  ncons_ += opts_.N * samples_ * cone_rows;                 // cone sign rows
  if (opts_.free_horizon) ncons_ += 2;                      // horizon box
}

Transcription transcribe(const ProblemSpec& spec, const TranscriptionOptions& opts) {
  return Transcription(spec, opts);
}

double Transcription::horizon_of(const Vector& x) const {
  if (!opts_.free_horizon) return opts_.fixed_S;
  return std::min(std::max(x[0], 0.01 * s_lo_), 10.0 * s_hi_);
}

void Transcription::decode_interval(const Vector& x, int i, SimplexControlRow& row) const {
  const int n = spec_->n(), m = spec_->m(), d = spec_->d();
  const int base = (opts_.free_horizon ? 1 : 0) + i * per_interval_;
  const double wmax = std::sqrt(sphere_radius_sq_);
  for (int k = 0; k < samples_; ++k) {
    SpaceTimeControlSample& smp = row.rows[k];
    smp.w = x.segment(base + k * m, m);
    // Project onto the sign cone; the cone rows push the raw iterate back.
    for (int c = 0; c < m; ++c) {
      switch (spec_->cone.sign[c]) {
        case ControlCone::Sign::NonNeg:
          smp.w[c] = std::max(smp.w[c], 0.0);
          break;
        case ControlCone::Sign::NonPos:
          smp.w[c] = std::min(smp.w[c], 0.0);
          break;
        case ControlCone::Sign::Zero:
          smp.w[c] = 0.0;
          break;
        default:
          break;
      }
    }
    double wn = smp.w.norm();
    // Clamp into the sphere chart so w0 stays real; the AL rows push the raw
    // iterate back inside.
    if (wn > wmax * (1.0 - 1e-12)) {
      smp.w *= wmax * (1.0 - 1e-12) / wn;
      wn = wmax * (1.0 - 1e-12);
    }
    smp.w0 = std::pow(1.0 - pow_int(wn, d), 1.0 / d);
    smp.a_index = 0;
  }
  if (opts_.layer == Layer::Relaxed) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      row.lambda[k] = x[base + samples_ * m + k];
      sum += row.lambda[k];
    }
    row.lambda[n] = 1.0 - sum;
  } else {
    row.lambda[0] = 1.0;
  }
}

Vector Transcription::cold_start() const {
  Vector x = Vector::Zero(dim_);
  if (opts_.free_horizon) x[0] = 0.5 * (s_lo_ + s_hi_);
  // Slight offset keeps degree-1 instances off the |w| kink at the origin.
  const int m = spec_->m();
  for (int i = 0; i < opts_.N; ++i) {
    int base = (opts_.free_horizon ? 1 : 0) + i * per_interval_;
    for (int k = 0; k < samples_; ++k) x[base + k * m] = 0.05;
    if (opts_.layer == Layer::Relaxed)
      for (int k = 0; k < spec_->n(); ++k)
        x[base + samples_ * m + k] = 1.0 / (spec_->n() + 1.0);
  }
  return x;
}

Vector Transcription::pack(const Process& proc) const {
  if (proc.intervals() != opts_.N)
    throw ParameterError("pack: process interval count differs from transcription N");
  Vector x = Vector::Zero(dim_);
  if (opts_.free_horizon) x[0] = proc.S();
  const int m = spec_->m();
  for (int i = 0; i < opts_.N; ++i) {
    int base = (opts_.free_horizon ? 1 : 0) + i * per_interval_;
    if (opts_.layer == Layer::Relaxed) {
      const SimplexControlRow& row =
          proc.layer == Layer::Relaxed ? proc.simplex[i] : SimplexControlRow{};
      if (proc.layer != Layer::Relaxed)
        throw ParameterError("pack: relaxed transcription needs a relaxed process");
      for (int k = 0; k < samples_; ++k) x.segment(base + k * m, m) = row.rows[k].w;
      for (int k = 0; k < spec_->n(); ++k) x[base + samples_ * m + k] = row.lambda[k];
    } else {
      x.segment(base, m) = proc.controls[i].w;
    }
  }
  return x;
}

Process Transcription::unpack(const Vector& x) const {
  const double S = horizon_of(x);
  Vector grid = uniform_grid(S, opts_.N);
  SimplexControlRow row;
  row.rows.assign(samples_, SpaceTimeControlSample{});
  row.lambda = Vector::Zero(std::max(samples_, 1));
  if (opts_.layer == Layer::Relaxed) {
    std::vector<SimplexControlRow> rows(opts_.N);
    for (int i = 0; i < opts_.N; ++i) {
      decode_interval(x, i, row);
      // Sanitize the simplex weights for the stored process.
      for (int k = 0; k <= spec_->n(); ++k) row.lambda[k] = std::max(row.lambda[k], 0.0);
      double sum = row.lambda.sum();
      if (sum <= 0.0)
        row.lambda.setConstant(1.0 / (spec_->n() + 1.0));
      else
        row.lambda /= sum;
      rows[i] = row;
    }
    return integrate_relaxed(*spec_, rows, grid, opts_.substeps);
  }
  std::vector<SpaceTimeControlSample> controls(opts_.N);
  for (int i = 0; i < opts_.N; ++i) {
    decode_interval(x, i, row);
    controls[i] = row.rows[0];
  }
  Layer layer = opts_.layer;
  return integrate_extended(*spec_, grid, controls, layer, {opts_.substeps});
}

void Transcription::evaluate(const Vector& x, Eval& out, DynamicsEvaluator& ev) const {
  const int n = spec_->n(), N = opts_.N;
  const double S = horizon_of(x);
  const double ds = S / N;
  out.cons.resize(ncons_);
  int ci = 0;

  SimplexControlRow row;
  row.rows.assign(samples_, SpaceTimeControlSample{});
  for (auto& smp : row.rows) smp.w = Vector::Zero(spec_->m());
  row.lambda = Vector::Zero(n + 1);

  double y0 = 0.0, nu = 0.0;
  Vector y = spec_->x0;
  Vector xi = Vector::Zero(n + 1);

  double worst_h = spec_->h.eval(0.0, y);
  double tube_sup = 0.0;
  const Process* ref = opts_.probe_ref;
  auto tube_probe = [&](double s, double t, const Vector& state) {
    if (!opts_.probe_mode) return;
    double dsup = 0.0;
    for (int c = 0; c < n; ++c)
      dsup = std::max(dsup,
                      std::abs(state[c] - interp_col(ref->grid, ref->traj.col(1 + c), s)));
    (void)t;
    tube_sup = std::max(tube_sup, dsup);
  };

  if (!opts_.probe_mode) out.cons[ci++] = worst_h;
  tube_probe(0.0, 0.0, y);

  // Forward shooting with constraint rows appended per node.
  std::vector<double> sphere_rows, simplex_rows, cone_rows;
  sphere_rows.reserve(N * samples_);
  for (int i = 0; i < N; ++i) {
    decode_interval(x, i, row);
    // Sphere and cone rows use the raw decision values, not the clamped ones.
    const int base = (opts_.free_horizon ? 1 : 0) + i * per_interval_;
    for (int k = 0; k < samples_; ++k) {
      double wns = x.segment(base + k * spec_->m(), spec_->m()).squaredNorm();
      sphere_rows.push_back(wns - sphere_radius_sq_);
      for (int c = 0; c < spec_->m(); ++c) {
        auto sgn = spec_->cone.sign[c];
        if (sgn == ControlCone::Sign::Free) continue;
        double wc = x[base + k * spec_->m() + c];
        if (sgn == ControlCone::Sign::NonNeg)
          cone_rows.push_back(-wc);
        else if (sgn == ControlCone::Sign::NonPos)
          cone_rows.push_back(wc);
        else {
          cone_rows.push_back(wc);
          cone_rows.push_back(-wc);
        }
      }
    }
    if (opts_.layer == Layer::Relaxed)
      for (int k = 0; k <= n; ++k) simplex_rows.push_back(-row.lambda[k]);

    if (opts_.layer == Layer::Relaxed)
      ev.advance_relaxed(ds, row, y0, y, nu, xi, opts_.substeps);
    else
      ev.advance(ds, row.rows[0].w0, row.rows[0].w, row.rows[0].a_index, y0, y, nu,
                 opts_.substeps);
    double hval = spec_->h.eval(y0, y);
    worst_h = std::max(worst_h, hval);
    if (!opts_.probe_mode) out.cons[ci++] = hval;
    tube_probe(ds * (i + 1), y0, y);
  }

  double target_dist = spec_->target.distance(y0, y);
  double budget_excess = std::isfinite(spec_->budget) ? std::max(nu - spec_->budget, 0.0) : 0.0;

  if (!opts_.probe_mode) {
    if (std::isfinite(spec_->budget)) out.cons[ci++] = nu - spec_->budget;
    Vector z(1 + n);
    z[0] = y0;
    z.tail(n) = y;
    for (int r = 0; r < spec_->target.C.rows(); ++r)
      out.cons[ci++] = spec_->target.C.row(r).dot(z) - spec_->target.b[r];
  }
  for (double v : sphere_rows) out.cons[ci++] = v;
  for (double v : simplex_rows) out.cons[ci++] = v;
  for (double v : cone_rows) out.cons[ci++] = v;
  if (opts_.free_horizon) {
    out.cons[ci++] = x[0] - s_hi_;
    out.cons[ci++] = s_lo_ - x[0];
  }
  if (ci != ncons_) throw NumericError("transcription: constraint count mismatch");

  if (opts_.probe_mode) {
    double tube = tube_sup + std::abs(S - ref->S());
    out.objective = std::max(worst_h, 0.0) + target_dist + budget_excess +
                    opts_.probe_penalty * std::max(tube - opts_.probe_delta, 0.0);
  } else {
    out.objective = spec_->cost.eval(y0, y, nu);
  }
}

std::string Transcription::layout_doc() const {
  std::ostringstream os;
  os << "layer=" << layer_name(opts_.layer) << " N=" << opts_.N << " dim=" << dim_
     << " (horizon " << (opts_.free_horizon ? "free" : "fixed") << ", " << samples_
     << " sample(s)/interval, " << per_interval_ << " vars/interval), constraints=" << ncons_;
  return os.str();
}

// ---------------------------------------------------------------------------
// Augmented Lagrangian with L-BFGS inner iterations and FD gradients
// ---------------------------------------------------------------------------

namespace {

// PHR augmented Lagrangian for inequality constraints c(x) <= 0.
struct ALFunction {
  const Transcription* trans;
  Vector mult;     // lambda_i >= 0
  double penalty;  // rho
  mutable long evals = 0;

  double value(const Vector& x, Transcription::Eval& scratch, DynamicsEvaluator& ev) const {
    ++evals;
    trans->evaluate(x, scratch, ev);
    double phi = scratch.objective;
    const double rho = penalty;
    for (int i = 0; i < scratch.cons.size(); ++i) {
      double t = mult[i] + rho * scratch.cons[i];
      if (t > 0.0) phi += (t * t - mult[i] * mult[i]) / (2.0 * rho);
      else phi -= mult[i] * mult[i] / (2.0 * rho);
    }
    return phi;
  }
};

struct LbfgsBuffers {
  std::vector<Vector> s, yv;
  std::vector<double> rho;
};

// Forward-difference gradient of the AL merit.
void fd_gradient(const ALFunction& al, const Vector& x, double f0, double rel_step, Vector& grad,
                 Transcription::Eval& scratch, DynamicsEvaluator& ev) {
  const int D = static_cast<int>(x.size());
  grad.resize(D);
  Vector xp = x;
  for (int i = 0; i < D; ++i) {
    double h = rel_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    double fp = al.value(xp, scratch, ev);
    grad[i] = (fp - f0) / h;
    xp[i] = x[i];
  }
}

// Two-loop L-BFGS direction.
Vector lbfgs_direction(const LbfgsBuffers& buf, const Vector& grad) {
  Vector q = grad;
  const int k = static_cast<int>(buf.s.size());
  std::vector<double> alpha(k);
  for (int i = k - 1; i >= 0; --i) {
    alpha[i] = buf.rho[i] * buf.s[i].dot(q);
    q -= alpha[i] * buf.yv[i];
  }
  if (k > 0) {
    double gamma = buf.s[k - 1].dot(buf.yv[k - 1]) / buf.yv[k - 1].squaredNorm();
    q *= gamma;
  }
  for (int i = 0; i < k; ++i) {
    double beta = buf.rho[i] * buf.yv[i].dot(q);
    q += (alpha[i] - beta) * buf.s[i];
  }
  return -q;
}

struct InnerResult {
  double f = 0.0;
  double grad_inf = kInf;
  long iters = 0;
};

InnerResult lbfgs_minimize(const ALFunction& al, Vector& x, const SolverOptions& opts,
                           Transcription::Eval& scratch, DynamicsEvaluator& ev) {
  InnerResult res;
  LbfgsBuffers buf;
  Vector grad, grad_new;
  double f = al.value(x, scratch, ev);
  fd_gradient(al, x, f, opts.fd_step, grad, scratch, ev);
  for (int it = 0; it < opts.max_inner; ++it) {
    res.iters = it + 1;
    res.grad_inf = grad.cwiseAbs().maxCoeff();
    if (res.grad_inf <= opts.inner_tol * (1.0 + std::abs(f))) break;

    Vector dir = lbfgs_direction(buf, grad);
    double slope = grad.dot(dir);
    if (slope > -1e-16) {
      buf = LbfgsBuffers{};
      dir = -grad;
      slope = -grad.squaredNorm();
    }
    // Armijo backtracking.
    double step = 1.0;
    double f_new = f;
    Vector x_new;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      x_new = x + step * dir;
      f_new = al.value(x_new, scratch, ev);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled at FD noise level

    fd_gradient(al, x_new, f_new, opts.fd_step, grad_new, scratch, ev);
    Vector svec = x_new - x;
    Vector yvec = grad_new - grad;
    double sy = svec.dot(yvec);
    if (sy > 1e-12 * svec.norm() * yvec.norm()) {
      buf.s.push_back(svec);
      buf.yv.push_back(yvec);
      buf.rho.push_back(1.0 / sy);
      if (static_cast<int>(buf.s.size()) > opts.lbfgs_mem) {
        buf.s.erase(buf.s.begin());
        buf.yv.erase(buf.yv.begin());
        buf.rho.erase(buf.rho.begin());
      }
    }
    x = x_new;
    f = f_new;
    grad.swap(grad_new);
  }
  res.f = f;
  res.grad_inf = grad.cwiseAbs().maxCoeff();
  return res;
}

}  // namespace

std::string SolveReport::status_name() const {
  switch (status) {
    case Status::Converged:
      return "converged";
    case Status::Stalled:
      return "stalled";
    case Status::Infeasible:
      return "infeasible";
  }
  return "?";
}

SolveReport solve_nlp(const Transcription& trans, const Process* init, const SolverOptions& opts) {
  auto t_start = std::chrono::steady_clock::now();
  SolveReport rep;
  DynamicsEvaluator ev(trans.spec());
  Transcription::Eval scratch;

  Vector x = init != nullptr ? trans.pack(*init) : trans.cold_start();

  ALFunction al;
  al.trans = &trans;
  al.mult = Vector::Zero(trans.num_constraints());
  al.penalty = opts.init_penalty;

  double best_viol = kInf, best_obj = kInf;
  Vector best_x = x;
  double prev_viol = kInf;
  double kkt = kInf;

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    rep.outer_iters = outer + 1;
    InnerResult inner = lbfgs_minimize(al, x, opts, scratch, ev);
    rep.inner_iters += inner.iters;

    trans.evaluate(x, scratch, ev);
    double viol = scratch.cons.size() > 0 ? std::max(scratch.cons.maxCoeff(), 0.0) : 0.0;
    kkt = inner.grad_inf;

    if (viol < best_viol - 1e-14 ||
        (viol <= best_viol + 1e-14 && scratch.objective < best_obj)) {
      best_viol = viol;
      best_obj = scratch.objective;
      best_x = x;
    }
    rep.outer_violation.push_back(best_viol);

    if (viol <= opts.tol_feas && kkt <= opts.tol_kkt) {
      rep.status = SolveReport::Status::Converged;
      break;
    }
    // Multiplier update, then penalty growth on insufficient decrease.
    for (int i = 0; i < scratch.cons.size(); ++i)
      al.mult[i] = std::max(0.0, al.mult[i] + al.penalty * scratch.cons[i]);
    if (viol > opts.sufficient_decrease * prev_viol && outer > 0)
      al.penalty *= opts.penalty_growth;
    prev_viol = viol;
  }

  // Report the best iterate; objective and violation are recomputed on the
  // reported process so the report is self-consistent.
  rep.best = trans.unpack(best_x);
  const int NN = rep.best.intervals();
  if (trans.options().probe_mode) {
    trans.evaluate(best_x, scratch, ev);
    rep.objective = scratch.objective;
    rep.violation = best_viol;
  } else {
    rep.objective =
        trans.spec().cost.eval(rep.best.y0(NN), rep.best.y(NN), rep.best.nu(NN));
    FeasibilityRecord fr = check_feasibility(trans.spec(), rep.best, opts.tol_feas);
    rep.violation = std::max({fr.max_constraint_violation, fr.target_distance, fr.budget_excess});
  }
  rep.kkt_residual = kkt;
  rep.evaluations = al.evals;
  if (rep.status != SolveReport::Status::Converged)
    rep.status = best_viol > 100.0 * opts.tol_feas ? SolveReport::Status::Infeasible
                                                   : SolveReport::Status::Stalled;
  // h-node multipliers seed the certification stage.
  const int node_rows = trans.options().probe_mode ? 0 : trans.options().N + 1;
  rep.node_multipliers.assign(node_rows, 0.0);
  for (int i = 0; i < node_rows; ++i) rep.node_multipliers[i] = al.mult[i];

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

namespace {

int worker_count() {
  if (const char* env = std::getenv("GAPCERT_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

Vector randomized_start(const Transcription& trans, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& opts = trans.options();
  const ProblemSpec& spec = trans.spec();
  Vector x = trans.cold_start();
  int base = opts.free_horizon ? 1 : 0;
  if (opts.free_horizon) {
    double lo = opts.min_horizon_frac * spec.horizon;
    x[0] = lo + (spec.horizon - lo) * unit(rng);
  }
  const double wmax = 0.8;
  for (int i = base; i < x.size(); ++i) x[i] = wmax * (2.0 * unit(rng) - 1.0);
  // Re-seed simplex weights uniformly.
  if (opts.layer == Layer::Relaxed) {
    const int m = spec.m();
    for (int i = 0; i < opts.N; ++i) {
      int off = base + i * trans.vars_per_interval() + trans.samples_per_interval() * m;
      double remaining = 1.0;
      for (int k = 0; k < spec.n(); ++k) {
        double v = remaining * unit(rng) / (spec.n() - k + 1.0);
        x[off + k] = v;
        remaining -= v;
      }
    }
  }
  // Respect the sign cone at the start.
  for (int i = 0; i < opts.N; ++i) {
    int off = base + i * trans.vars_per_interval();
    for (int k = 0; k < trans.samples_per_interval(); ++k)
      for (int c = 0; c < spec.m(); ++c) {
        double& v = x[off + k * spec.m() + c];
        switch (spec.cone.sign[c]) {
          case ControlCone::Sign::NonNeg:
            v = std::abs(v);
            break;
          case ControlCone::Sign::NonPos:
            v = -std::abs(v);
            break;
          case ControlCone::Sign::Zero:
            v = 0.0;
            break;
          default:
            break;
        }
      }
  }
  return x;
}

}  // namespace

SolveReport multistart(const Transcription& trans, int count, std::uint64_t seed,
                       const SolverOptions& opts) {
  if (count < 1) throw ParameterError("multistart: count >= 1");
  auto t_start = std::chrono::steady_clock::now();

  std::vector<SolveReport> reports(count);
  auto run_one = [&](int idx) {
    if (idx == 0) {
      reports[idx] = solve_nlp(trans, nullptr, opts);
    } else {
      Vector x0 = randomized_start(trans, seed + static_cast<std::uint64_t>(idx));
      // Route the randomized start through solve_nlp by a temporary process.
      SolverOptions o = opts;
      Process warm = trans.unpack(x0);
      reports[idx] = solve_nlp(trans, &warm, o);
    }
  };

  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          int i = next.fetch_add(1);
          if (i >= count) return;
          run_one(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  // Deterministic merge: feasibility first, then objective, then start index.
  int best = 0;
  auto better = [&](int a, int b) {
    const auto& ra = reports[a];
    const auto& rb = reports[b];
    bool fa = ra.violation <= opts.tol_feas * 10;
    bool fb = rb.violation <= opts.tol_feas * 10;
    if (fa != fb) return fa;
    if (fa) {
      if (ra.objective != rb.objective) return ra.objective < rb.objective;
    } else {
      if (ra.violation != rb.violation) return ra.violation < rb.violation;
    }
    return a < b;
  };
  long total_inner = 0;
  long total_evals = 0;
  for (int i = 1; i < count; ++i)
    if (better(i, best)) best = i;
  for (const auto& r : reports) {
    total_inner += r.inner_iters;
    total_evals += r.evaluations;
  }
  SolveReport rep = reports[best];
  rep.inner_iters = total_inner;
  rep.evaluations = total_evals;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

}  // namespace gapcert
