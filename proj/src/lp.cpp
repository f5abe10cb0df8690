#include "gapcert/lp.hpp"

#include <cmath>

namespace gapcert {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;

// Full-tableau simplex state. Columns: structural vars, slacks, artificials;
// the last column is the rhs, the last row the reduced-cost row.
struct Tableau {
  Matrix T;                // (m+1) x (ncols+1)
  std::vector<int> basis;  // size m
  int m = 0;
  int ncols = 0;
  int price_limit = 0;  // columns >= price_limit never enter the basis

  double rhs(int i) const { return T(i, ncols); }

  void pivot(int r, int c) {
    T.row(r) /= T(r, c);
    for (int i = 0; i <= m; ++i) {
      if (i == r) continue;
      double f = T(i, c);
      if (f != 0.0) T.row(i) -= f * T.row(r);
    }
    basis[r] = c;
  }

  // Minimizes the cost row. Returns false on iteration limit.
  bool run(bool* unbounded) {
    *unbounded = false;
    const long max_iters = 200L * (m + ncols) + 2000;
    long iter = 0;
    bool bland = false;
    while (true) {
      if (++iter > max_iters) return false;
      if (iter > max_iters / 2) bland = true;
      int c = -1;
      double best = -kCostTol;
      for (int j = 0; j < price_limit; ++j) {
        double rc = T(m, j);
        if (rc < best) {
          c = j;
          best = rc;
          if (bland) break;
        }
      }
      if (c < 0) return true;  // optimal
      int r = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        double a = T(i, c);
        if (a > kPivotTol) {
          double ratio = rhs(i) / a;
          if (r < 0 || ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && basis[i] < basis[r])) {
            r = i;
            best_ratio = ratio;
          }
        }
      }
      if (r < 0) {
        *unbounded = true;
        return true;
      }
      pivot(r, c);
    }
  }
};

}  // namespace

LinearProgram::LinearProgram(int num_vars) : nvars_(num_vars) {
  c_ = Vector::Zero(num_vars);
}

int LinearProgram::add_row(const Vector& a, double rhs, bool equality) {
  rows_.push_back(a);
  rhs_.push_back(rhs);
  eq_.push_back(equality);
  return static_cast<int>(rows_.size()) - 1;
}

void LinearProgram::set_objective(const Vector& c) { c_ = c; }

namespace {

struct Standardized {
  Tableau tab;
  int nslack = 0;
  int first_artificial = 0;
  bool phase1_feasible = false;
};

// Builds the standard-form tableau and runs phase 1.
Standardized build_and_phase1(int nvars, const std::vector<Vector>& rows,
                              const std::vector<double>& rhs, const std::vector<bool>& eq) {
  Standardized sd;
  const int m = static_cast<int>(rows.size());
  int nslack = 0;
  for (bool e : eq)
    if (!e) ++nslack;

  // Artificial variables are assigned to rows whose slack cannot serve as the
  // initial basic variable (equalities and rows negated to make rhs >= 0).
  std::vector<int> slack_col(m, -1);
  std::vector<bool> need_art(m, false);
  int sc = nvars;
  for (int i = 0; i < m; ++i) {
    if (!eq[i]) slack_col[i] = sc++;
    bool flip = rhs[i] < 0.0;
    need_art[i] = eq[i] || flip;
  }
  int nart = 0;
  for (int i = 0; i < m; ++i)
    if (need_art[i]) ++nart;

  Tableau& tab = sd.tab;
  tab.m = m;
  tab.ncols = nvars + nslack + nart;
  sd.nslack = nslack;
  sd.first_artificial = nvars + nslack;
  tab.T = Matrix::Zero(m + 1, tab.ncols + 1);
  tab.basis.assign(m, -1);

  int ac = sd.first_artificial;
  for (int i = 0; i < m; ++i) {
    double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
    tab.T.block(i, 0, 1, nvars) = sign * rows[i].transpose();
    tab.T(i, tab.ncols) = sign * rhs[i];
    if (slack_col[i] >= 0) tab.T(i, slack_col[i]) = sign;
    if (need_art[i]) {
      tab.T(i, ac) = 1.0;
      tab.basis[i] = ac++;
    } else {
      tab.basis[i] = slack_col[i];
    }
  }

  // Phase-1 cost: sum of artificials; price it out against the start basis.
  for (int j = sd.first_artificial; j < tab.ncols; ++j) tab.T(m, j) = 1.0;
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] >= sd.first_artificial) tab.T.row(m) -= tab.T.row(i);
  tab.price_limit = tab.ncols;

  bool unbounded = false;
  if (!tab.run(&unbounded)) {
    sd.phase1_feasible = false;
    return sd;
  }
  double art_sum = -tab.T(m, tab.ncols);
  sd.phase1_feasible = art_sum < kPhase1Tol;
  if (!sd.phase1_feasible) return sd;

  // Drive zero-valued artificial basics out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < sd.first_artificial) continue;
    int c = -1;
    for (int j = 0; j < sd.first_artificial; ++j)
      if (std::abs(tab.T(i, j)) > 1e-7) {
        c = j;
        break;
      }
    if (c >= 0) tab.pivot(i, c);
    // Otherwise the row is redundant; the artificial stays basic at value 0.
  }
  return sd;
}

LinearProgram::Result phase2(Standardized& sd, int nvars, const Vector& c) {
  LinearProgram::Result res;
  Tableau& tab = sd.tab;
  const int m = tab.m;
  // Install the phase-2 cost row (minimize -c'x) and price out the basis.
  tab.T.row(m).setZero();
  for (int j = 0; j < nvars; ++j) tab.T(m, j) = -c[j];
  for (int i = 0; i < m; ++i) {
    int b = tab.basis[i];
    double f = tab.T(m, b);
    if (f != 0.0) tab.T.row(m) -= f * tab.T.row(i);
  }
  tab.price_limit = sd.first_artificial;

  bool unbounded = false;
  if (!tab.run(&unbounded)) {
    res.status = LinearProgram::Status::IterationLimit;
    return res;
  }
  if (unbounded) {
    res.status = LinearProgram::Status::Unbounded;
    return res;
  }
  res.status = LinearProgram::Status::Optimal;
  res.x = Vector::Zero(nvars);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < nvars) res.x[tab.basis[i]] = tab.rhs(i);
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace

LinearProgram::Result LinearProgram::solve() const {
  Result res;
  if (rows_.empty()) {
    // No constraints: optimum is 0 unless some cost coefficient is positive.
    res.x = Vector::Zero(nvars_);
    bool unbounded = nvars_ > 0 && (c_.array() > kCostTol).any();
    res.status = unbounded ? Status::Unbounded : Status::Optimal;
    res.objective = 0.0;
    return res;
  }
  Standardized sd = build_and_phase1(nvars_, rows_, rhs_, eq_);
  if (!sd.phase1_feasible) {
    res.status = Status::Infeasible;
    return res;
  }
  return phase2(sd, nvars_, c_);
}

std::vector<LinearProgram::Result> LinearProgram::solve_many(
    const std::vector<Vector>& objectives) const {
  std::vector<Result> out;
  out.reserve(objectives.size());
  if (rows_.empty()) {
    for (const Vector& c : objectives) {
      Result r;
      r.x = Vector::Zero(nvars_);
      bool unbounded = nvars_ > 0 && (c.array() > kCostTol).any();
      r.status = unbounded ? Status::Unbounded : Status::Optimal;
      out.push_back(std::move(r));
    }
    return out;
  }
  Standardized base = build_and_phase1(nvars_, rows_, rhs_, eq_);
  for (const Vector& c : objectives) {
    if (!base.phase1_feasible) {
      Result r;
      r.status = Status::Infeasible;
      out.push_back(std::move(r));
      continue;
    }
    Standardized sd = base;  // restart each member from the phase-1 basis
    out.push_back(phase2(sd, nvars_, c));
  }
  return out;
}

bool LinearProgram::feasible() const {
  if (rows_.empty()) return true;
  Standardized sd = build_and_phase1(nvars_, rows_, rhs_, eq_);
  return sd.phase1_feasible;
}

}  // namespace gapcert
