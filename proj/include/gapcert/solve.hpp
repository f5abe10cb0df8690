#ifndef GAPCERT_SOLVE_HPP
#define GAPCERT_SOLVE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gapcert/integrate.hpp"
#include "gapcert/model.hpp"

namespace gapcert {

struct TranscriptionOptions {
  Layer layer = Layer::Extended;
  int N = 40;
  double w0_floor = 0.05;  // strict layer only
  int substeps = 1;
  // Horizon handling: free by default with S in [min_frac, 1] * spec.horizon.
  bool free_horizon = true;
  double fixed_S = 1.0;
  double min_horizon_frac = 0.05;
  // Isolation-probe mode: the objective becomes the feasibility merit
  // (max constraint violation + target distance + budget excess) plus an
  // exact penalty on leaving the tube around `probe_ref`.
  bool probe_mode = false;
  const Process* probe_ref = nullptr;
  double probe_delta = 0.2;
  double probe_penalty = 1e3;
};

// Single-shooting transcription. Decision vector layout:
//   [0]                     horizon S               (when free_horizon)
//   per interval i = 0..N-1:
//     extended/strict       w_i in R^m
//     relaxed               w^0_i..w^n_i in R^m, then lambda^0_i..lambda^{n-1}_i
// w0 is eliminated through the sphere identity w0 = (1-|w|^d)^{1/d};
// lambda^n is eliminated through the simplex identity.
// Inequality constraints (all rows c(x) <= 0), in order:
//   h at every node, budget, target rows, per-sample |w|^2 - r^2,
//   relaxed simplex nonnegativity, cone sign rows, horizon box.
class Transcription {
public:
  Transcription(const ProblemSpec& spec, TranscriptionOptions opts);

  const ProblemSpec& spec() const { return *spec_; }
  const TranscriptionOptions& options() const { return opts_; }
  int dim() const { return dim_; }
  int num_constraints() const { return ncons_; }
  int vars_per_interval() const { return per_interval_; }

  // Number of w-samples carried per interval (1, or n+1 for relaxed).
  int samples_per_interval() const { return samples_; }

  Vector cold_start() const;
  Vector pack(const Process& proc) const;
  Process unpack(const Vector& x) const;

  struct Eval {
    double objective = 0.0;
    Vector cons;
  };

  // One single-shooting pass: integrates and fills objective + constraints.
  void evaluate(const Vector& x, Eval& out, DynamicsEvaluator& ev) const;

  std::string layout_doc() const;

private:
  void decode_interval(const Vector& x, int i, SimplexControlRow& row) const;
  double horizon_of(const Vector& x) const;

  const ProblemSpec* spec_;
  TranscriptionOptions opts_;
  int dim_ = 0;
  int ncons_ = 0;
  int per_interval_ = 0;
  int samples_ = 1;
  double sphere_radius_sq_ = 1.0;
  double s_lo_ = 0.0, s_hi_ = 0.0;
};

Transcription transcribe(const ProblemSpec& spec, const TranscriptionOptions& opts);

struct SolverOptions {
  double tol_feas = 1e-6;
  double tol_kkt = 1e-5;
  double init_penalty = 10.0;
  double penalty_growth = 5.0;
  double sufficient_decrease = 0.25;  // required violation shrink per outer
  double inner_tol = 1e-8;
  int max_outer = 10;
  int max_inner = 150;
  int lbfgs_mem = 10;
  double fd_step = 1e-6;  // relative forward-difference step
};

struct SolveReport {
  enum class Status { Converged, Stalled, Infeasible };
  Status status = Status::Stalled;
  Process best;
  double objective = 0.0;
  double kkt_residual = kInf;
  double violation = kInf;
  int outer_iters = 0;
  long inner_iters = 0;
  long evaluations = 0;
  double seconds = 0.0;
  // Best-so-far feasibility merit per outer iteration (nonincreasing).
  std::vector<double> outer_violation;
  // Final augmented-Lagrangian multipliers of the h node rows.
  std::vector<double> node_multipliers;

  std::string status_name() const;
};

SolveReport solve_nlp(const Transcription& trans, const Process* init, const SolverOptions& opts);

// Best of `count` randomized starts; deterministic for a fixed seed. Starts
// run concurrently (capped by GAPCERT_THREADS); the merge is by value.
SolveReport multistart(const Transcription& trans, int count, std::uint64_t seed,
                       const SolverOptions& opts);

}  // namespace gapcert

#endif  // GAPCERT_SOLVE_HPP
