#ifndef GAPCERT_PMP_HPP
#define GAPCERT_PMP_HPP

#include <string>
#include <vector>

#include "gapcert/model.hpp"

namespace gapcert {

enum class CertifyMode { FixedTime, FreeImpulsive };

std::string mode_name(CertifyMode mode);

// Generator-list view of the nonsmooth data: convex-hull generators of the
// hybrid subdifferential of h in (t,x), the cost gradient, and the exact
// dynamics Jacobians from the field library.
struct SubdifferentialOracle {
  const ProblemSpec* spec = nullptr;

  explicit SubdifferentialOracle(const ProblemSpec& s) : spec(&s) {}

  int num_generators() const { return static_cast<int>(spec->h_generators.size()); }
  bool smooth() const { return spec->h_smooth; }
  // (zeta0, zeta) in R^{1+n}.
  Vector generator(int g, double t, const Vector& x) const;
  // grad Psi in R^{1+n+1} at the endpoint.
  Vector cost_gradient(double t, const Vector& x, double v) const;
  // sum_k lambda^k dF/dx at the own control of interval i, state at the right
  // node (backward-Euler convention), and the matching dF/dt column.
  void interval_jacobian(const Process& proc, int interval, Matrix& jac_x, Vector& jac_t) const;
};

struct Atom {
  int node = 0;
  double mass = 0.0;
  Vector weights;  // per-generator masses, sum = mass
};

// Discrete multiplier set (p, p0, gamma, pi, mu, m) with the derived q paths.
struct MultiplierSet {
  CertifyMode mode = CertifyMode::FreeImpulsive;
  Matrix p;         // (N+1) x n
  Vector p0;        // (N+1), free-impulsive mode
  double gamma = 0.0;
  double pi = 0.0;  // <= 0
  std::vector<Atom> atoms;
  // Derived: values on the open intervals (ess-sup view of q) and closures.
  Matrix q_interval;   // N x n
  Vector q0_interval;  // N
  Vector qS;           // q(S) with the [0,S] closure convention
  double q0S = 0.0;

  double total_mass() const;
  double interior_mass() const;  // mu(]0,S])
  // Recompute q_interval/qS from (p, atoms) and the generator oracle;
  // bit-for-bit reproducible.
  void derive_q(const SubdifferentialOracle& oracle, const Process& proc);
  // Positive rescaling of the whole set (homogeneity checks).
  void scale(double c);
};

struct ResidualTable {
  double adjoint = 0.0;         // max backward-Euler step defect
  double transversality = 0.0;  // distance to gamma dPsi + normal cone
  double ham_max = 0.0;         // max over grid of H(sample) - H(own), clamped
  double ham_zero = 0.0;        // max |H(own)| (free-impulsive mode)
  double support = 0.0;         // atom mass sitting where h < -tol_active
  double nontriviality = 0.0;   // ||p||_inf + ||mu||_TV + gamma
  double strengthened = 0.0;    // mu(]0,S]) + ||q||_inf + gamma

  double worst_defect() const;
};

enum class Classification {
  NondegenerateNormal,
  NormalDegeneratePossible,
  Abnormal,
  NondegenerateAbnormal,
  NotExtremal,
};

std::string classification_name(Classification c);

struct ExtremalReport {
  Classification classification = Classification::NotExtremal;
  bool gamma0_feasible = false;         // question (i)
  bool nondeg_gamma0_feasible = false;  // question (ii)
  double max_gamma = 0.0;               // optimum of the gamma-max member
  double nondeg_best = 0.0;             // best strengthened probe under gamma=0
  double not_extremal_defect = 0.0;     // min uniform Hamiltonian slack
  std::vector<MultiplierSet> witnesses;
  std::vector<ResidualTable> witness_residuals;
  std::vector<std::string> witness_labels;
  std::string detail;
};

struct CQReport {
  bool boundary = false;     // (0, x0) on the boundary of {h <= 0}
  bool trivially = false;    // interior initial point: vacuously satisfied
  bool satisfied = false;
  SpaceTimeControlSample witness;
  double margin = 0.0;       // descent margin delta_tilde (positive = good)
  std::string branch;        // "w0-positive" or "inward-pointing"
  double ipfc_margin = 0.0;  // delta_tilde_1 for the inward-pointing branch
};

struct PmpOptions {
  Tolerances tol;
  double lp_slack = 1e-9;      // Hamiltonian-row slack inside the LP
  int ham_directions = 8;     // control-direction count of the W sample grid
  std::vector<double> w0_levels = {0.0, 0.5, 1.0};
  int dense_prefix = 10;      // intervals 0..k-1 always carry LP rows
  int enforced_intervals = 24;  // strided interval rows beyond the prefix
  int probe_nodes = 21;       // probe count for the strengthened LP family
  int max_cut_rounds = 3;     // audit-driven row refinement rounds
};

// One backward adjoint step over `interval`: returns (dp, dp0) such that
// p_k = p_{k+1} + dp with -pdot = sum_k lambda^k q . dF/dx frozen at the
// right node (backward Euler).
void adjoint_step(const SubdifferentialOracle& oracle, const Process& proc,
                  const Vector& q_next, double q0_next, int interval, Vector& dp, double& dp0);

// Sample grid over W x A used by Hamiltonian maximization rows and searches.
std::vector<SpaceTimeControlSample> control_sample_grid(const ProblemSpec& spec,
                                                        const PmpOptions& opts);

ResidualTable residuals(const ProblemSpec& spec, const Process& proc, const MultiplierSet& mult,
                        CertifyMode mode, const PmpOptions& opts = {});

ExtremalReport classify(const ProblemSpec& spec, const Process& proc, CertifyMode mode,
                        const PmpOptions& opts = {});

CQReport check_cq_h6(const ProblemSpec& spec, const Process& proc, double s_bar,
                     const PmpOptions& opts = {});

}  // namespace gapcert

#endif  // GAPCERT_PMP_HPP
