#ifndef GAPCERT_RELAX_HPP
#define GAPCERT_RELAX_HPP

#include <vector>

#include "gapcert/model.hpp"

namespace gapcert {

// Deterministic time-slicing plan: within each eta-slice the n+1 rows are
// played in order 0..n for durations proportional to the slice average of
// lambda.
struct ChatterSchedule {
  double eta = 0.0;
  struct Piece {
    double s0 = 0.0;
    double s1 = 0.0;
    int row = 0;
  };
  std::vector<Piece> pieces;

  void validate(const Process& relaxed, double tol = 1e-9) const;
};

// Integrates the simplex-weighted system
//   (xi', y0', y', nu') = (lambda, sum_k l^k (w0^k)^d, sum_k l^k F(.,w^k,a^k),
//                          sum_k l^k |w^k|^d)
// over the given grid.
Process integrate_relaxed(const ProblemSpec& spec, const std::vector<SimplexControlRow>& rows,
                          const Vector& grid, int substeps = 1);

ChatterSchedule make_chatter_schedule(const Process& relaxed, double eta);

// Plays the schedule as an extended process; sup-error against the relaxed
// trajectory is O(eta).
Process chatter(const ProblemSpec& spec, const Process& relaxed, double eta, int substeps = 1);

struct InnerApproxResult {
  Process proc;      // strict layer
  double sup_error;  // ||y_strict - y_ext||_inf over nodes
};

// Replaces samples with w0 < w0_floor by (w0_floor, (1-w0_floor^d)^{1/d} w/|w|)
// and re-integrates.
InnerApproxResult inner_approximate(const ProblemSpec& spec, const Process& ext, double w0_floor,
                                    int substeps = 1);

}  // namespace gapcert

#endif  // GAPCERT_RELAX_HPP
