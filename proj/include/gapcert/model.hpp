#ifndef GAPCERT_MODEL_HPP
#define GAPCERT_MODEL_HPP

#include <string>
#include <vector>

#include "gapcert/fields.hpp"
#include "gapcert/types.hpp"

namespace gapcert {

// Ordered multi-index (k; j1 <= ... <= jk), 1-based control component indices.
struct MultiIndex {
  int k = 0;
  std::vector<int> j;

  bool operator==(const MultiIndex& o) const { return k == o.k && j == o.j; }
  std::string str() const;
};

// Control-polynomial dynamics
//   F(t,x,w0,w,a) = f(t,x,a) (w0)^d
//                 + sum_k sum_{j1<=...<=jk} g^k_{j...}(t,x) w^{j1}...w^{jk} (w0)^{d-k}.
struct PolynomialDynamics {
  int n = 0;  // state dim
  int m = 0;  // control dim
  int q = 0;  // parameter dim
  int d = 1;  // degree
  VectorField drift;
  std::vector<std::pair<MultiIndex, VectorField>> coeffs;

  void validate() const;
};

// Closed cone U of admissible unbounded controls: componentwise sign pattern
// or a finite ray list (membership via LP feasibility).
struct ControlCone {
  enum class Sign { Free, NonNeg, NonPos, Zero };
  bool sign_form = true;
  std::vector<Sign> sign;  // size m
  Matrix rays;             // m x R

  static ControlCone all_free(int m);
  bool contains(const Vector& w, double tol = 1e-9) const;
};

// Polyhedral target {(t,x) : C (t,x) <= b}, with the generating box kept when
// the set was declared as one (exact Euclidean distances come for free then).
struct TargetSet {
  Matrix C;  // rows x (1+n)
  Vector b;
  bool has_box = false;
  Vector lo, hi;  // size 1+n when has_box

  bool contains(double t, const Vector& x, double tol = 1e-9) const;
  // Euclidean distance of (t,x) to the target. Exact for boxes; for general
  // rows computed by active-set projection.
  double distance(double t, const Vector& x) const;
  bool nonempty() const;
};

struct ProblemSpec {
  std::string name;
  PolynomialDynamics dyn;
  ControlCone cone;
  Matrix param_set;  // q x P, one column per point of A; 0 x 1 when q == 0
  ScalarField h;
  // Convex-hull generators over-approximating the hybrid subdifferential of h
  // at active points; each maps (t,x) -> (zeta0, zeta) in R^{1+n}. When
  // h_smooth, the list holds the single analytic gradient.
  std::vector<VectorField> h_generators;
  bool h_smooth = true;
  TargetSet target;
  CostField cost;
  double budget = kInf;   // K
  Vector x0;              // initial state
  double horizon = 1.0;   // upper bound on the pseudo-time horizon S

  int n() const { return dyn.n; }
  int m() const { return dyn.m; }
  int d() const { return dyn.d; }
  int num_params() const { return static_cast<int>(param_set.cols()); }
  Vector param(int idx) const { return param_set.col(idx); }

  void validate() const;
};

// Point of the compactified control set W = {(w0,w): (w0)^d + |w|^d = 1, w in U}.
struct SpaceTimeControlSample {
  double w0 = 1.0;
  Vector w;
  int a_index = 0;

  void validate(const ProblemSpec& spec, double tol = 1e-9) const;
};

// One interval of a relaxed control: n+1 vertices of W x A and simplex weights.
struct SimplexControlRow {
  std::vector<SpaceTimeControlSample> rows;  // n+1 entries
  Vector lambda;                             // n+1, in the simplex

  void validate(const ProblemSpec& spec, double tol = 1e-12) const;
};

enum class Layer { Strict, Extended, Relaxed };

std::string layer_name(Layer layer);

// Time grid, per-interval controls, and integrated trajectory of one of the
// three problem layers. Trajectory rows hold (y0, y, nu); relaxed processes
// additionally carry the simplex bookkeeping state xi.
struct Process {
  Layer layer = Layer::Extended;
  Vector grid;                                    // N+1 strictly increasing, grid[0] = 0
  std::vector<SpaceTimeControlSample> controls;   // N entries (strict/extended)
  std::vector<SimplexControlRow> simplex;         // N entries (relaxed)
  Matrix traj;                                    // (N+1) x (2+n)
  Matrix xi;                                      // (N+1) x (n+1) (relaxed)

  int intervals() const { return static_cast<int>(grid.size()) - 1; }
  double S() const { return grid[grid.size() - 1]; }
  double y0(int node) const { return traj(node, 0); }
  Vector y(int node) const { return traj.row(node).segment(1, traj.cols() - 2).transpose(); }
  double nu(int node) const { return traj(node, traj.cols() - 1); }

  // Structural invariants (grid monotone, layer-specific control checks,
  // y0/nu monotone from zero). Dynamics residuals live in integrate.hpp.
  void validate(const ProblemSpec& spec) const;
};

struct FeasibilityRecord {
  double max_constraint_violation = 0.0;
  double target_distance = 0.0;
  double budget_excess = 0.0;

  bool feasible(double tol) const {
    return max_constraint_violation <= tol && target_distance <= tol && budget_excess <= tol;
  }
};

// --- operations ---

ProblemSpec load_problem(const std::string& path);
ProblemSpec parse_problem(const std::string& text, const std::string& origin = "<memory>");

// F(t,x,w0,w,a) as displayed above.
Vector eval_extended_dynamics(const ProblemSpec& spec, double t, const Vector& x,
                              const SpaceTimeControlSample& sample);

// Degree-d homogeneous part only (w0 = 0). Requires |w| = 1.
Vector eval_fast_dynamics(const ProblemSpec& spec, double t, const Vector& x, const Vector& w);

// d/dx and d/dt of F at a sample; exact via the field library.
void extended_dynamics_jac_x(const ProblemSpec& spec, double t, const Vector& x,
                             const SpaceTimeControlSample& sample, Matrix& jac);
Vector extended_dynamics_dt(const ProblemSpec& spec, double t, const Vector& x,
                            const SpaceTimeControlSample& sample);

FeasibilityRecord check_feasibility(const ProblemSpec& spec, const Process& proc, double tol);

}  // namespace gapcert

#endif  // GAPCERT_MODEL_HPP
