#ifndef GAPCERT_LP_HPP
#define GAPCERT_LP_HPP

#include <vector>

#include "gapcert/types.hpp"

namespace gapcert {

// Dense two-phase primal simplex for small/medium problems.
//
//   maximize c'x   subject to  A x {<=,=} b,  x >= 0.
//
// Rows are tagged by `row_eq` (true = equality). Internally the problem is
// brought to standard form with slack variables and solved on a full tableau
// with Bland's rule as anti-cycling fallback.
class LinearProgram {
public:
  enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

  struct Result {
    Status status = Status::Infeasible;
    double objective = 0.0;
    Vector x;  // primal point in the original variables
  };

  LinearProgram(int num_vars);

  // Adds a row a'x <= rhs (or == rhs). Returns the row index.
  int add_row(const Vector& a, double rhs, bool equality);
  void set_objective(const Vector& c);  // maximized

  int num_vars() const { return nvars_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  // Solves from scratch (phase 1 + phase 2).
  Result solve() const;

  // Solves one problem per objective over the same rows, running phase 1 once.
  std::vector<Result> solve_many(const std::vector<Vector>& objectives) const;

  // Feasibility only (phase 1).
  bool feasible() const;

private:
  int nvars_;
  Vector c_;
  std::vector<Vector> rows_;
  std::vector<double> rhs_;
  std::vector<bool> eq_;
};

}  // namespace gapcert

#endif  // GAPCERT_LP_HPP
