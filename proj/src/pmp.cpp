#include "gapcert/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "gapcert/integrate.hpp"
#include "gapcert/lp.hpp"
#include "gapcert/polyhedral.hpp"

namespace gapcert {

namespace {

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::string mode_name(CertifyMode mode) {
  return mode == CertifyMode::FixedTime ? "fixed" : "free-impulsive";
}

std::string classification_name(Classification c) {
  switch (c) {
    case Classification::NondegenerateNormal:
      return "nondegenerate-normal";
    case Classification::NormalDegeneratePossible:
      return "normal-but-degenerate-possible";
    case Classification::Abnormal:
      return "abnormal";
    case Classification::NondegenerateAbnormal:
      return "nondegenerate-abnormal";
    case Classification::NotExtremal:
      return "not-extremal";
  }
  return "?";
}

Vector SubdifferentialOracle::generator(int g, double t, const Vector& x) const {
  Vector out(1 + spec->n());
  spec->h_generators[g].eval(t, x, Vector(), out);
  return out;
}

Vector SubdifferentialOracle::cost_gradient(double t, const Vector& x, double v) const {
  Vector g(1 + spec->n() + 1);
  spec->cost.grad(t, x, v, g);
  return g;
}

void SubdifferentialOracle::interval_jacobian(const Process& proc, int interval, Matrix& jac_x,
                                              Vector& jac_t) const {
  const int n = spec->n();
  const double t = proc.y0(interval + 1);
  const Vector y = proc.y(interval + 1);
  jac_x.setZero(n, n);
  jac_t = Vector::Zero(n);
  Matrix tmp;
  if (proc.layer == Layer::Relaxed) {
    const SimplexControlRow& row = proc.simplex[interval];
    for (size_t k = 0; k < row.rows.size(); ++k) {
      double lk = row.lambda[static_cast<int>(k)];
      if (lk <= 0.0) continue;
      extended_dynamics_jac_x(*spec, t, y, row.rows[k], tmp);
      jac_x += lk * tmp;
      jac_t += lk * extended_dynamics_dt(*spec, t, y, row.rows[k]);
    }
  } else {
    extended_dynamics_jac_x(*spec, t, y, proc.controls[interval], jac_x);
    jac_t = extended_dynamics_dt(*spec, t, y, proc.controls[interval]);
  }
}

double MultiplierSet::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double MultiplierSet::interior_mass() const {
  double m = 0.0;
  for (const auto& a : atoms)
    if (a.node > 0) m += a.mass;
  return m;
}

void MultiplierSet::derive_q(const SubdifferentialOracle& oracle, const Process& proc) {
  const int N = proc.intervals();
  const int n = static_cast<int>(p.cols());
  q_interval.setZero(N, n);
  q0_interval = Vector::Zero(N);
  Vector cum = Vector::Zero(n);
  double cum0 = 0.0;
  std::vector<std::pair<int, std::pair<double, Vector>>> contribs;  // node -> (m0*mass, m*mass)
  for (const auto& a : atoms) {
    Vector mz = Vector::Zero(1 + n);
    for (int g = 0; g < oracle.num_generators(); ++g)
      mz += a.weights[g] * oracle.generator(g, proc.y0(a.node), proc.y(a.node));
    contribs.push_back({a.node, {mz[0], mz.tail(n)}});
  }
  for (int i = 0; i < N; ++i) {
    // Interval (s_i, s_{i+1}) sees atoms at nodes <= i; p is frozen at the
    // right node to match the backward-Euler convention.
    for (auto& [node, mv] : contribs)
      if (node == i) {
        cum0 += mv.first;
        cum += mv.second;
      }
    q0_interval[i] = (p0.size() > 0 ? p0[i + 1] : 0.0) + cum0;
    q_interval.row(i) = p.row(i + 1) + cum.transpose();
  }
  // Closure at S: all atoms, including one at the final node.
  for (auto& [node, mv] : contribs)
    if (node == N) {
      cum0 += mv.first;
      cum += mv.second;
    }
  qS = p.row(N).transpose() + cum;
  q0S = (p0.size() > 0 ? p0[N] : 0.0) + cum0;
}

void MultiplierSet::scale(double c) {
  p *= c;
  if (p0.size() > 0) p0 *= c;
  gamma *= c;
  pi *= c;
  for (auto& a : atoms) {
    a.mass *= c;
    a.weights *= c;
  }
  q_interval *= c;
  q0_interval *= c;
  qS *= c;
  q0S *= c;
}

double ResidualTable::worst_defect() const {
  return std::max({adjoint, transversality, ham_max, ham_zero, support});
}

void adjoint_step(const SubdifferentialOracle& oracle, const Process& proc, const Vector& q_next,
                  double q0_next, int interval, Vector& dp, double& dp0) {
  Matrix jac_x;
  Vector jac_t;
  oracle.interval_jacobian(proc, interval, jac_x, jac_t);
  const double ds = proc.grid[interval + 1] - proc.grid[interval];
  dp = ds * (jac_x.transpose() * q_next);
  dp0 = ds * jac_t.dot(q_next);
  (void)q0_next;
}

std::vector<SpaceTimeControlSample> control_sample_grid(const ProblemSpec& spec,
                                                        const PmpOptions& opts) {
  const int m = spec.m(), d = spec.d();
  std::vector<Vector> dirs;
  if (m == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
  } else if (m == 2) {
    for (int k = 0; k < opts.ham_directions; ++k) {
      double ang = 2.0 * M_PI * k / opts.ham_directions;
      Vector v(2);
      v << std::cos(ang), std::sin(ang);
      // Snap near-axis directions so coordinate rays are exact.
      for (int c = 0; c < 2; ++c)
        if (std::abs(v[c]) < 1e-12) v[c] = 0.0;
      dirs.push_back(v.normalized());
    }
  } else {
    for (int c = 0; c < m; ++c) {
      Vector v = Vector::Zero(m);
      v[c] = 1.0;
      dirs.push_back(v);
      dirs.push_back(-v);
    }
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < opts.ham_directions; ++k) {
      Vector v(m);
      for (int c = 0; c < m; ++c) v[c] = gauss(rng);
      if (v.norm() > 1e-9) dirs.push_back(v.normalized());
    }
  }

  std::vector<SpaceTimeControlSample> grid;
  const int P = spec.num_params();
  for (int ai = 0; ai < P; ++ai) {
    bool drift_added = false;
    for (double lev : opts.w0_levels) {
      double wmag = std::pow(std::max(0.0, 1.0 - pow_int(lev, d)), 1.0 / d);
      if (wmag <= 1e-14) {
        if (drift_added) continue;
        SpaceTimeControlSample s;
        s.w0 = 1.0;
        s.w = Vector::Zero(m);
        s.a_index = ai;
        grid.push_back(s);
        drift_added = true;
        continue;
      }
      for (const Vector& dir : dirs) {
        Vector w = wmag * dir;
        if (!spec.cone.contains(w, 1e-9)) continue;
        SpaceTimeControlSample s;
        s.w0 = lev;
        s.w = w;
        s.a_index = ai;
        grid.push_back(s);
      }
    }
  }
  if (grid.empty()) throw ParameterError("control sample grid is empty (cone too restrictive?)");
  return grid;
}

// ---------------------------------------------------------------------------
// Shared machinery for residuals and the multiplier LP
// ---------------------------------------------------------------------------

namespace {

// Hamiltonian H = q0 (w0)^d + q . F + pi |w|^d (free mode) or q . F (fixed).
struct HamData {
  // Per interval: own rows (velocities and w0/|w| powers) and samples.
  struct OwnRow {
    Vector velocity;
    double w0d = 0.0;
    double wd = 0.0;
  };
  std::vector<std::vector<OwnRow>> own;    // per interval
  std::vector<Matrix> sample_velocity;     // per interval: n x num_samples
  Vector sample_w0d, sample_wd;            // per sample
  int num_samples = 0;
};

HamData build_ham_data(const ProblemSpec& spec, const Process& proc,
                       const std::vector<SpaceTimeControlSample>& grid) {
  HamData hd;
  const int N = proc.intervals();
  const int d = spec.d();
  hd.num_samples = static_cast<int>(grid.size());
  hd.sample_w0d.resize(hd.num_samples);
  hd.sample_wd.resize(hd.num_samples);
  for (int s = 0; s < hd.num_samples; ++s) {
    hd.sample_w0d[s] = pow_int(grid[s].w0, d);
    hd.sample_wd[s] = pow_int(grid[s].w.norm(), d);
  }
  hd.own.resize(N);
  hd.sample_velocity.resize(N);
  DynamicsEvaluator ev(spec);
  Vector vel(spec.n());
  for (int i = 0; i < N; ++i) {
    const double t = proc.y0(i + 1);
    const Vector y = proc.y(i + 1);
    if (proc.layer == Layer::Relaxed) {
      const auto& row = proc.simplex[i];
      for (size_t k = 0; k < row.rows.size(); ++k) {
        if (row.lambda[static_cast<int>(k)] <= 1e-12) continue;
        HamData::OwnRow own;
        ev.eval(t, y, row.rows[k].w0, row.rows[k].w, row.rows[k].a_index, vel);
        own.velocity = vel;
        own.w0d = pow_int(row.rows[k].w0, d);
        own.wd = pow_int(row.rows[k].w.norm(), d);
        hd.own[i].push_back(own);
      }
    } else {
      const auto& c = proc.controls[i];
      HamData::OwnRow own;
      ev.eval(t, y, c.w0, c.w, c.a_index, vel);
      own.velocity = vel;
      own.w0d = pow_int(c.w0, d);
      own.wd = pow_int(c.w.norm(), d);
      hd.own[i].push_back(own);
    }
    Matrix& sv = hd.sample_velocity[i];
    sv.resize(spec.n(), hd.num_samples);
    for (int s = 0; s < hd.num_samples; ++s) {
      ev.eval(t, y, grid[s].w0, grid[s].w, grid[s].a_index, vel);
      sv.col(s) = vel;
    }
  }
  return hd;
}

// Active rows of the target polyhedron (and the budget face) at the endpoint.
struct ActiveCones {
  std::vector<int> target_rows;
  bool budget_active = false;
};

ActiveCones active_cones(const ProblemSpec& spec, const Process& proc, double tol_active) {
  ActiveCones ac;
  const int N = proc.intervals();
  Vector z(1 + spec.n());
  z[0] = proc.y0(N);
  z.tail(spec.n()) = proc.y(N);
  for (int r = 0; r < spec.target.C.rows(); ++r)
    if (spec.target.C.row(r).dot(z) - spec.target.b[r] >= -tol_active)
      ac.target_rows.push_back(r);
  if (std::isfinite(spec.budget) && proc.nu(N) >= spec.budget - tol_active)
    ac.budget_active = true;
  return ac;
}

double activity_tolerance(const ProblemSpec& spec, const Process& proc, double base) {
  double scale = 0.0;
  for (int i = 0; i <= proc.intervals(); ++i)
    scale = std::max(scale, std::abs(spec.h.eval(proc.y0(i), proc.y(i))));
  return base * (1.0 + scale);
}

}  // namespace

ResidualTable residuals(const ProblemSpec& spec, const Process& proc, const MultiplierSet& mult,
                        CertifyMode mode, const PmpOptions& opts) {
  SubdifferentialOracle oracle(spec);
  const int N = proc.intervals();
  const int n = spec.n();
  const bool free_mode = mode == CertifyMode::FreeImpulsive;
  ResidualTable table;

  // (a) adjoint defect of the backward-Euler recursion.
  Vector dp;
  double dp0 = 0.0;
  for (int i = 0; i < N; ++i) {
    adjoint_step(oracle, proc, mult.q_interval.row(i).transpose(), mult.q0_interval[i], i, dp,
                 dp0);
    double defect =
        (mult.p.row(i).transpose() - (mult.p.row(i + 1).transpose() + dp)).cwiseAbs().maxCoeff();
    if (free_mode && mult.p0.size() > 0)
      defect = std::max(defect, std::abs(mult.p0[i] - (mult.p0[i + 1] + dp0)));
    table.adjoint = std::max(table.adjoint, defect);
  }

  // (b) transversality: distance to gamma dPsi + N_{T* x ]-inf,K]}.
  {
    Vector gpsi = oracle.cost_gradient(proc.y0(N), proc.y(N), proc.nu(N));
    ActiveCones ac = active_cones(spec, proc, activity_tolerance(spec, proc, opts.tol.active));
    int dim = free_mode ? 1 + n + 1 : n;
    Vector v(dim);
    if (free_mode) {
      v[0] = -mult.q0S - mult.gamma * gpsi[0];
      v.segment(1, n) = -mult.qS - mult.gamma * gpsi.segment(1, n);
      v[1 + n] = -mult.pi - mult.gamma * gpsi[1 + n];
    } else {
      v = -mult.qS - mult.gamma * gpsi.segment(1, n);
    }
    std::vector<Vector> gens;
    for (int r : ac.target_rows) {
      Vector g = Vector::Zero(dim);
      if (free_mode) {
        g.head(1 + n) = spec.target.C.row(r).transpose();
      } else {
        if (std::abs(spec.target.C(r, 0)) > 1e-12) continue;  // t-only faces have no x part
        g = spec.target.C.row(r).tail(n).transpose();
      }
      if (g.norm() > 1e-14) gens.push_back(g);
    }
    if (free_mode && ac.budget_active) {
      Vector g = Vector::Zero(dim);
      g[1 + n] = 1.0;
      gens.push_back(g);
    }
    Matrix G(dim, gens.size());
    for (size_t c = 0; c < gens.size(); ++c) G.col(c) = gens[c];
    table.transversality = cone_distance(G, v);
  }

  // (c)/(d) Hamiltonian maximization and the free-time H = 0 equality.
  {
    auto grid = control_sample_grid(spec, opts);
    HamData hd = build_ham_data(spec, proc, grid);
    for (int i = 0; i < N; ++i) {
      Vector q = mult.q_interval.row(i).transpose();
      double q0 = mult.q0_interval[i];
      double best_sample = -kInf;
      for (int s = 0; s < hd.num_samples; ++s) {
        double hval = q.dot(hd.sample_velocity[i].col(s));
        if (free_mode) hval += q0 * hd.sample_w0d[s] + mult.pi * hd.sample_wd[s];
        best_sample = std::max(best_sample, hval);
      }
      for (const auto& own : hd.own[i]) {
        double hown = q.dot(own.velocity);
        if (free_mode) hown += q0 * own.w0d + mult.pi * own.wd;
        table.ham_max = std::max(table.ham_max, best_sample - hown);
        if (free_mode) table.ham_zero = std::max(table.ham_zero, std::abs(hown));
      }
    }
    table.ham_max = std::max(table.ham_max, 0.0);
  }

  // (e) support defect.
  {
    double tol_a = activity_tolerance(spec, proc, opts.tol.active);
    for (const auto& a : mult.atoms)
      if (spec.h.eval(proc.y0(a.node), proc.y(a.node)) < -tol_a) table.support += a.mass;
  }

  // (f)/(g) nontriviality and strengthened values.
  {
    double p_inf = 0.0;
    for (int i = 0; i <= N; ++i) p_inf = std::max(p_inf, mult.p.row(i).cwiseAbs().maxCoeff());
    table.nontriviality = p_inf + mult.total_mass() + mult.gamma;
    double q_inf = 0.0;
    for (int i = 0; i < N; ++i) q_inf = std::max(q_inf, mult.q_interval.row(i).cwiseAbs().maxCoeff());
    table.strengthened = mult.interior_mass() + q_inf + mult.gamma;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Multiplier LP
// ---------------------------------------------------------------------------

namespace {

struct CertLP {
  const ProblemSpec* spec;
  const Process* proc;
  CertifyMode mode;
  PmpOptions opts;
  SubdifferentialOracle oracle;
  std::vector<SpaceTimeControlSample> grid;
  HamData hd;
  ActiveCones ac;
  Vector gpsi;

  // Unknown layout.
  int n = 0, N = 0;
  bool free_mode = false;
  int off_ps_plus = 0, off_ps_minus = 0;
  int off_p0_plus = -1, off_p0_minus = -1;
  int off_gamma = -1, off_pi = -1;  // pi stored as pi_neg >= 0 (pi = -pi_neg)
  int off_beta = -1;
  int off_theta = -1;
  int off_defect = -1;  // uniform Hamiltonian slack variable (defect LP only)
  int num_unknowns = 0;
  std::vector<int> atom_nodes;
  int gens = 0;
  std::vector<Matrix> atom_gen;  // per candidate atom: (1+n) x gens generator values

  // Symbolic p/q as affine maps of the unknown vector.
  std::vector<Matrix> P_node;  // (N+1) entries, n x U
  std::vector<Vector> P0_node;
  std::vector<Matrix> Q_int;  // N entries, n x U
  std::vector<Vector> Q0_int;
  Matrix QS;  // n x U
  Vector Q0S;

  std::set<int> enforced;  // intervals carrying H rows

  CertLP(const ProblemSpec& s, const Process& pr, CertifyMode md, const PmpOptions& op)
      : spec(&s), proc(&pr), mode(md), opts(op), oracle(s) {
    n = s.n();
    N = pr.intervals();
    free_mode = md == CertifyMode::FreeImpulsive;
    grid = control_sample_grid(s, op);
    hd = build_ham_data(s, pr, grid);
    ac = active_cones(s, pr, activity_tolerance(s, pr, op.tol.active));
    gpsi = oracle.cost_gradient(pr.y0(N), pr.y(N), pr.nu(N));

    double tol_a = activity_tolerance(s, pr, op.tol.active);
    for (int i = 0; i <= N; ++i)
      if (s.h.eval(pr.y0(i), pr.y(i)) >= -tol_a) atom_nodes.push_back(i);
    gens = oracle.num_generators();
    for (int j : atom_nodes) {
      Matrix Gm(1 + n, gens);
      for (int g = 0; g < gens; ++g) Gm.col(g) = oracle.generator(g, pr.y0(j), pr.y(j));
      atom_gen.push_back(Gm);
    }

    // Default enforced intervals: a dense prefix, an even stride, the last.
    for (int i = 0; i < std::min(N, opts.dense_prefix); ++i) enforced.insert(i);
    int stride = std::max(1, N / std::max(1, opts.enforced_intervals));
    for (int i = 0; i < N; i += stride) enforced.insert(i);
    enforced.insert(N - 1);

    layout();
    build_symbols();
  }

  void layout() {
    int off = 0;
    off_ps_plus = off;
    off += n;
    off_ps_minus = off;
    off += n;
    if (free_mode) {
      off_p0_plus = off++;
      off_p0_minus = off++;
    }
    off_gamma = off++;
    if (free_mode) off_pi = off++;
    off_beta = off;
    off += static_cast<int>(ac.target_rows.size()) + (free_mode && ac.budget_active ? 1 : 0);
    off_theta = off;
    off += static_cast<int>(atom_nodes.size()) * gens;
    off_defect = off++;  // always allocated; pinned to zero outside defect members
    num_unknowns = off;
  }

  int theta_index(int atom_pos, int g) const { return off_theta + atom_pos * gens + g; }

  void build_symbols() {
    P_node.assign(N + 1, Matrix::Zero(n, num_unknowns));
    P0_node.assign(N + 1, Vector::Zero(num_unknowns));
    Q_int.assign(N, Matrix::Zero(n, num_unknowns));
    Q0_int.assign(N, Vector::Zero(num_unknowns));

    for (int c = 0; c < n; ++c) {
      P_node[N](c, off_ps_plus + c) = 1.0;
      P_node[N](c, off_ps_minus + c) = -1.0;
    }
    if (free_mode) {
      P0_node[N][off_p0_plus] = 1.0;
      P0_node[N][off_p0_minus] = -1.0;
    }

    // Cumulative atom contributions by node (x part and t part).
    std::vector<Matrix> cum_x(N + 2, Matrix::Zero(n, num_unknowns));
    std::vector<Vector> cum_t(N + 2, Vector::Zero(num_unknowns));
    {
      Matrix run_x = Matrix::Zero(n, num_unknowns);
      Vector run_t = Vector::Zero(num_unknowns);
      size_t pos = 0;
      for (int node = 0; node <= N; ++node) {
        if (pos < atom_nodes.size() && atom_nodes[pos] == node) {
          for (int g = 0; g < gens; ++g) {
            int col = theta_index(static_cast<int>(pos), g);
            run_x.col(col) += atom_gen[pos].col(g).tail(n);
            run_t[col] += atom_gen[pos](0, g);
          }
          ++pos;
        }
        cum_x[node + 1] = run_x;  // atoms at nodes <= node
        cum_t[node + 1] = run_t;
      }
      cum_x[0].setZero();
      cum_t[0].setZero();
    }

    Matrix jac_x;
    Vector jac_t;
    for (int i = N - 1; i >= 0; --i) {
      // Interval i sees atoms with node <= i.
      Q_int[i] = P_node[i + 1] + cum_x[i + 1];
      Q0_int[i] = P0_node[i + 1] + cum_t[i + 1];
      oracle.interval_jacobian(*proc, i, jac_x, jac_t);
      const double ds = proc->grid[i + 1] - proc->grid[i];
      P_node[i] = P_node[i + 1] + ds * (jac_x.transpose() * Q_int[i]);
      P0_node[i] = P0_node[i + 1] + ds * (Q_int[i].transpose() * jac_t);
    }
    QS = P_node[N] + cum_x[N + 1];
    Q0S = P0_node[N] + cum_t[N + 1];
  }

  // Builds the LP rows shared by all family members.
  LinearProgram base_rows(bool defect_member, double slack) const {
    LinearProgram lp(num_unknowns);
    const int dimz = 1 + n;

    // Transversality.
    if (free_mode) {
      Vector row = Q0S;
      row[off_gamma] += gpsi[0];
      for (size_t r = 0; r < ac.target_rows.size(); ++r)
        row[off_beta + static_cast<int>(r)] += spec->target.C(ac.target_rows[r], 0);
      lp.add_row(row, 0.0, true);
      for (int c = 0; c < n; ++c) {
        Vector rowc = QS.row(c).transpose();
        rowc[off_gamma] += gpsi[1 + c];
        for (size_t r = 0; r < ac.target_rows.size(); ++r)
          rowc[off_beta + static_cast<int>(r)] += spec->target.C(ac.target_rows[r], 1 + c);
        lp.add_row(rowc, 0.0, true);
      }
      Vector rowpi = Vector::Zero(num_unknowns);
      rowpi[off_pi] = 1.0;  // -pi
      rowpi[off_gamma] = -gpsi[1 + n];
      if (ac.budget_active) rowpi[off_beta + static_cast<int>(ac.target_rows.size())] = -1.0;
      lp.add_row(rowpi, 0.0, true);
    } else {
      for (int c = 0; c < n; ++c) {
        Vector rowc = QS.row(c).transpose();
        rowc[off_gamma] += gpsi[1 + c];
        int bi = 0;
        for (int r : ac.target_rows) {
          if (std::abs(spec->target.C(r, 0)) > 1e-12) {
            ++bi;
            continue;
          }
          rowc[off_beta + bi] += spec->target.C(r, 1 + c);
          ++bi;
        }
        lp.add_row(rowc, 0.0, true);
      }
    }
    (void)dimz;

    // Hamiltonian rows on the enforced intervals.
    for (int i : enforced) {
      for (const auto& own : hd.own[i]) {
        Vector own_row = Q_int[i].transpose() * own.velocity;
        if (free_mode) {
          own_row += own.w0d * Q0_int[i];
          own_row[off_pi] -= own.wd;  // pi * wd with pi = -u
        }
        if (free_mode) {
          // H(own) = 0, relaxed to |H(own)| <= e in the defect member.
          if (defect_member) {
            Vector r1 = own_row;
            r1[off_defect] = -1.0;
            lp.add_row(r1, 0.0, false);
            Vector r2 = -own_row;
            r2[off_defect] = -1.0;
            lp.add_row(r2, 0.0, false);
          } else {
            lp.add_row(own_row, 0.0, true);
          }
        }
        for (int s = 0; s < hd.num_samples; ++s) {
          Vector row = Q_int[i].transpose() * hd.sample_velocity[i].col(s) - own_row;
          if (free_mode) {
            row += hd.sample_w0d[s] * Q0_int[i];
            row[off_pi] -= hd.sample_wd[s];
          }
          if (defect_member) row[off_defect] -= 1.0;
          lp.add_row(row, slack, false);
        }
      }
    }

    // Normalization: |p(S)| surrogate + masses + gamma (+|p0(S)|) = 1.
    Vector norm_row = Vector::Zero(num_unknowns);
    for (int c = 0; c < n; ++c) {
      norm_row[off_ps_plus + c] = 1.0;
      norm_row[off_ps_minus + c] = 1.0;
    }
    if (free_mode) {
      norm_row[off_p0_plus] = 1.0;
      norm_row[off_p0_minus] = 1.0;
    }
    norm_row[off_gamma] = 1.0;
    for (size_t a = 0; a < atom_nodes.size(); ++a)
      for (int g = 0; g < gens; ++g) norm_row[theta_index(static_cast<int>(a), g)] = 1.0;
    lp.add_row(norm_row, 1.0, true);

    if (!defect_member) {
      Vector pin = Vector::Zero(num_unknowns);
      pin[off_defect] = 1.0;
      lp.add_row(pin, 0.0, true);
    }
    return lp;
  }

  Vector objective_gamma() const {
    Vector c = Vector::Zero(num_unknowns);
    c[off_gamma] = 1.0;
    return c;
  }
  Vector objective_total_mass() const {
    Vector c = Vector::Zero(num_unknowns);
    for (size_t a = 0; a < atom_nodes.size(); ++a)
      for (int g = 0; g < gens; ++g) c[theta_index(static_cast<int>(a), g)] = 1.0;
    return c;
  }
  Vector objective_interior_mass() const {
    Vector c = Vector::Zero(num_unknowns);
    for (size_t a = 0; a < atom_nodes.size(); ++a)
      if (atom_nodes[a] > 0)
        for (int g = 0; g < gens; ++g) c[theta_index(static_cast<int>(a), g)] = 1.0;
    return c;
  }
  Vector objective_q_coord(int interval, int coord, double sign) const {
    return sign * Q_int[interval].row(coord).transpose();
  }
  Vector objective_defect() const {
    Vector c = Vector::Zero(num_unknowns);
    c[off_defect] = -1.0;  // maximize -e
    return c;
  }

  Vector gamma_zero_row() const {
    Vector r = Vector::Zero(num_unknowns);
    r[off_gamma] = 1.0;
    return r;
  }

  MultiplierSet extract(const Vector& u) const {
    MultiplierSet ms;
    ms.mode = mode;
    ms.gamma = u[off_gamma];
    ms.pi = free_mode ? -u[off_pi] : 0.0;
    Vector pS = u.segment(off_ps_plus, n) - u.segment(off_ps_minus, n);
    double p0S = free_mode ? u[off_p0_plus] - u[off_p0_minus] : 0.0;
    for (size_t a = 0; a < atom_nodes.size(); ++a) {
      Atom atom;
      atom.node = atom_nodes[a];
      atom.weights = Vector::Zero(gens);
      for (int g = 0; g < gens; ++g) atom.weights[g] = u[theta_index(static_cast<int>(a), g)];
      atom.mass = atom.weights.sum();
      if (atom.mass > 1e-14) ms.atoms.push_back(atom);
    }
    // Numeric backward pass reproduces the symbolic recursion.
    ms.p.resize(N + 1, n);
    ms.p0 = free_mode ? Vector::Zero(N + 1) : Vector();
    ms.p.row(N) = pS.transpose();
    if (free_mode) ms.p0[N] = p0S;
    // q on interval i is p(i+1) + atoms(<= i); accumulate atoms forward first.
    std::vector<Vector> cum_x(N + 1, Vector::Zero(n));
    std::vector<double> cum_t(N + 1, 0.0);
    {
      Vector run = Vector::Zero(n);
      double runt = 0.0;
      for (int node = 0; node <= N; ++node) {
        for (const auto& atom : ms.atoms)
          if (atom.node == node) {
            for (int g = 0; g < gens; ++g) {
              Vector zg = oracle.generator(g, proc->y0(node), proc->y(node));
              run += atom.weights[g] * zg.tail(n);
              runt += atom.weights[g] * zg[0];
            }
          }
        cum_x[node] = run;
        cum_t[node] = runt;
      }
    }
    Matrix jac_x;
    Vector jac_t;
    ms.q_interval.resize(N, n);
    ms.q0_interval = Vector::Zero(N);
    for (int i = N - 1; i >= 0; --i) {
      Vector qi = ms.p.row(i + 1).transpose() + cum_x[i];
      double q0i = (free_mode ? ms.p0[i + 1] : 0.0) + cum_t[i];
      ms.q_interval.row(i) = qi.transpose();
      ms.q0_interval[i] = q0i;
      oracle.interval_jacobian(*proc, i, jac_x, jac_t);
      const double ds = proc->grid[i + 1] - proc->grid[i];
      ms.p.row(i) = ms.p.row(i + 1) + (ds * (jac_x.transpose() * qi)).transpose();
      if (free_mode) ms.p0[i] = ms.p0[i + 1] + ds * jac_t.dot(qi);
    }
    ms.qS = pS + cum_x[N];
    ms.q0S = p0S + cum_t[N];
    return ms;
  }
};

}  // namespace

ExtremalReport classify(const ProblemSpec& spec, const Process& proc, CertifyMode mode,
                        const PmpOptions& opts) {
  ExtremalReport rep;
  std::ostringstream detail;
  CertLP lp(spec, proc, mode, opts);

  // Uniform-defect member: is any nontrivial multiplier approximately
  // consistent with the maximization conditions at all enforced intervals?
  {
    LinearProgram defect = lp.base_rows(/*defect_member=*/true, opts.lp_slack);
    defect.set_objective(lp.objective_defect());
    auto res = defect.solve();
    if (res.status != LinearProgram::Status::Optimal) {
      rep.classification = Classification::NotExtremal;
      rep.not_extremal_defect = kInf;
      rep.detail = "multiplier system infeasible (no normalized multiplier at any defect)";
      return rep;
    }
    rep.not_extremal_defect = -res.objective;
    if (rep.not_extremal_defect > opts.tol.ham_slack) {
      rep.classification = Classification::NotExtremal;
      detail << "min uniform Hamiltonian defect " << rep.not_extremal_defect
             << " exceeds tolerance " << opts.tol.ham_slack;
      rep.detail = detail.str();
      return rep;
    }
  }

  const double slack = std::max(opts.lp_slack, 2.0 * rep.not_extremal_defect);

  // Audit-driven refinement: add the worst violated intervals and rebuild.
  auto solve_with_cuts = [&](const Vector& objective, bool gamma_zero,
                             MultiplierSet& witness) -> std::pair<bool, double> {
    for (int round = 0;; ++round) {
      LinearProgram member = lp.base_rows(false, slack);
      if (gamma_zero) member.add_row(lp.gamma_zero_row(), 0.0, true);
      member.set_objective(objective);
      auto res = member.solve();
      if (res.status != LinearProgram::Status::Optimal) return {false, 0.0};
      witness = lp.extract(res.x);
      ResidualTable tab = residuals(spec, proc, witness, mode, opts);
      if (tab.worst_defect() <= opts.tol.ham_slack * 2.0 + 1e-9) return {true, res.objective};
      if (round >= opts.max_cut_rounds) return {false, res.objective};
      // Find violated intervals and enforce them.
      HamData& hd = lp.hd;
      bool added = false;
      for (int i = 0; i < lp.N; ++i) {
        if (lp.enforced.count(i)) continue;
        Vector q = witness.q_interval.row(i).transpose();
        double q0 = witness.q0_interval[i];
        double worst = 0.0;
        for (const auto& own : hd.own[i]) {
          double hown = q.dot(own.velocity);
          if (lp.free_mode) hown += q0 * own.w0d + witness.pi * own.wd;
          if (lp.free_mode) worst = std::max(worst, std::abs(hown));
          for (int s = 0; s < hd.num_samples; ++s) {
            double hs = q.dot(hd.sample_velocity[i].col(s));
            if (lp.free_mode) hs += q0 * hd.sample_w0d[s] + witness.pi * hd.sample_wd[s];
            worst = std::max(worst, hs - hown);
          }
        }
        if (worst > opts.tol.ham_slack) {
          lp.enforced.insert(i);
          added = true;
        }
      }
      if (!added) return {false, res.objective};
    }
  };

  // gamma-max member.
  MultiplierSet gamma_witness;
  auto [gmax_ok, gmax] = solve_with_cuts(lp.objective_gamma(), false, gamma_witness);
  rep.max_gamma = gmax_ok ? gmax : 0.0;
  bool gamma_positive = gmax_ok && gmax >= opts.tol.nondeg;

  // Question (i): gamma = 0 feasible?
  MultiplierSet abnormal_witness;
  auto [g0_ok, g0_mass] = solve_with_cuts(lp.objective_total_mass(), true, abnormal_witness);
  rep.gamma0_feasible = g0_ok;
  (void)g0_mass;

  // Question (ii): gamma = 0 with strengthened value >= eps_nd?
  MultiplierSet nondeg_witness;
  bool have_nondeg_witness = false;
  if (g0_ok) {
    std::vector<Vector> probes;
    probes.push_back(lp.objective_interior_mass());
    int stride = std::max(1, lp.N / std::max(1, opts.probe_nodes - 1));
    for (int i = 0; i < lp.N; i += stride)
      for (int c = 0; c < lp.n; ++c) {
        probes.push_back(lp.objective_q_coord(i, c, +1.0));
        probes.push_back(lp.objective_q_coord(i, c, -1.0));
      }
    for (const Vector& obj : probes) {
      MultiplierSet w;
      auto [ok, val] = solve_with_cuts(obj, true, w);
      if (!ok) continue;
      rep.nondeg_best = std::max(rep.nondeg_best, val);
      if (val >= opts.tol.nondeg) {
        nondeg_witness = w;
        have_nondeg_witness = true;
        break;
      }
    }
  }
  rep.nondeg_gamma0_feasible = have_nondeg_witness;

  // Classification per the four feasibility questions.
  if (have_nondeg_witness) {
    rep.classification = Classification::NondegenerateAbnormal;
  } else if (rep.gamma0_feasible && gamma_positive) {
    rep.classification = Classification::NondegenerateNormal;
  } else if (rep.gamma0_feasible) {
    rep.classification = Classification::Abnormal;
  } else {
    rep.classification = Classification::NormalDegeneratePossible;
  }

  auto push_witness = [&](MultiplierSet&& w, const std::string& label) {
    rep.witness_residuals.push_back(residuals(spec, proc, w, mode, opts));
    rep.witnesses.push_back(std::move(w));
    rep.witness_labels.push_back(label);
  };
  if (rep.gamma0_feasible) push_witness(std::move(abnormal_witness), "gamma=0");
  if (have_nondeg_witness) push_witness(std::move(nondeg_witness), "gamma=0 nondegenerate");
  if (gamma_positive) push_witness(std::move(gamma_witness), "gamma-max");

  detail << "max_gamma=" << rep.max_gamma << " nondeg_best=" << rep.nondeg_best
         << " defect=" << rep.not_extremal_defect;
  rep.detail = detail.str();
  return rep;
}

CQReport check_cq_h6(const ProblemSpec& spec, const Process& proc, double s_bar,
                     const PmpOptions& opts) {
  CQReport rep;
  const int n = spec.n();
  SubdifferentialOracle oracle(spec);
  if (s_bar <= 0.0 || s_bar > proc.S())
    throw ParameterError("check_cq_h6: s_bar must lie in (0, S]");

  // Boundary test: h near zero at (0, x0) and a sign probe finding h > 0
  // nearby (h = 0 alone may still be interior).
  double h0 = spec.h.eval(0.0, spec.x0);
  double tol_a = opts.tol.active * (1.0 + std::abs(h0));
  bool near_zero = h0 >= -tol_a;
  bool ascends = false;
  if (near_zero) {
    const double eps = 1e-3;
    for (int g = 0; g < oracle.num_generators(); ++g) {
      Vector z = oracle.generator(g, 0.0, spec.x0);
      double zn = z.norm();
      if (zn < 1e-12) continue;
      Vector xp = spec.x0 + eps * z.tail(n) / zn;
      if (spec.h.eval(eps * z[0] / zn, xp) > 0.0) ascends = true;
    }
    for (int c = 0; c < n && !ascends; ++c) {
      Vector xp = spec.x0;
      xp[c] += 1e-3;
      if (spec.h.eval(0.0, xp) > 0.0) ascends = true;
      xp[c] -= 2e-3;
      if (spec.h.eval(0.0, xp) > 0.0) ascends = true;
    }
  }
  rep.boundary = near_zero && ascends;
  if (!rep.boundary) {
    rep.trivially = true;
    rep.satisfied = true;
    rep.branch = "interior";
    return rep;
  }

  // Own controls on [0, s_bar].
  struct OwnCtl {
    double w0d;
    Vector velocity;
    double w0;
  };
  std::vector<OwnCtl> own;
  const int d = spec.d();
  DynamicsEvaluator ev(spec);
  Vector vel(n);
  for (int i = 0; i < proc.intervals(); ++i) {
    double mid = 0.5 * (proc.grid[i] + proc.grid[i + 1]);
    if (mid > s_bar) break;
    if (proc.layer == Layer::Relaxed) {
      const auto& row = proc.simplex[i];
      for (size_t k = 0; k < row.rows.size(); ++k) {
        if (row.lambda[static_cast<int>(k)] <= 1e-12) continue;
        ev.eval(0.0, spec.x0, row.rows[k].w0, row.rows[k].w, row.rows[k].a_index, vel);
        own.push_back({pow_int(row.rows[k].w0, d), vel, row.rows[k].w0});
      }
    } else {
      const auto& c = proc.controls[i];
      ev.eval(0.0, spec.x0, c.w0, c.w, c.a_index, vel);
      own.push_back({pow_int(c.w0, d), vel, c.w0});
    }
  }
  if (own.empty()) throw ParameterError("check_cq_h6: no reference control on [0, s_bar]");

  // Search the sample grid for the deepest uniform descent direction.
  auto grid = control_sample_grid(spec, opts);
  double best_margin = kInf;
  int best = -1;
  for (size_t s = 0; s < grid.size(); ++s) {
    ev.eval(0.0, spec.x0, grid[s].w0, grid[s].w, grid[s].a_index, vel);
    double w0d = pow_int(grid[s].w0, d);
    double worst = -kInf;
    for (int g = 0; g < oracle.num_generators(); ++g) {
      Vector z = oracle.generator(g, 0.0, spec.x0);
      for (const auto& o : own) {
        double val = z[0] * (w0d - o.w0d) + z.tail(n).dot(vel - o.velocity);
        worst = std::max(worst, val);
      }
    }
    if (worst < best_margin) {
      best_margin = worst;
      best = static_cast<int>(s);
    }
  }
  rep.witness = grid[best];
  rep.margin = -best_margin;  // positive margin = strict descent

  bool w0_positive = true;
  for (const auto& o : own)
    if (o.w0 <= 0.0) w0_positive = false;
  if (w0_positive) {
    rep.branch = "w0-positive";
    rep.satisfied = best_margin < 0.0;
  } else {
    rep.branch = "inward-pointing";
    double worst = -kInf;
    for (int g = 0; g < oracle.num_generators(); ++g) {
      Vector z = oracle.generator(g, 0.0, spec.x0);
      for (const auto& o : own) worst = std::max(worst, z[0] * o.w0d + z.tail(n).dot(o.velocity));
    }
    rep.ipfc_margin = -worst;
    rep.satisfied = best_margin < 0.0 && worst < 0.0;
  }
  return rep;
}

}  // namespace gapcert
