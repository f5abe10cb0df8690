#ifndef GAPCERT_INTEGRATE_HPP
#define GAPCERT_INTEGRATE_HPP

#include <vector>

#include "gapcert/model.hpp"

namespace gapcert {

// Allocation-free evaluator of the compactified dynamics F. Parameter points
// are prefetched; stage buffers live here so RK4 stepping stays off the heap.
class DynamicsEvaluator {
public:
  explicit DynamicsEvaluator(const ProblemSpec& spec);

  const ProblemSpec& spec() const { return *spec_; }

  // out = F(t, x, w0, w, a_idx). No sphere-identity requirement; the original
  // system is recovered with (w0, w) = (1, u).
  void eval(double t, const Vector& x, double w0, const Vector& w, int a_idx, VecRef out);

  // One RK4 macro-interval of length len with constant control. y0 advances
  // exactly ((w0)^d constant), nu likewise; the y stages track the moving y0.
  void advance(double len, double w0, const Vector& w, int a_idx, double& y0, Vector& y,
               double& nu, int substeps);

  // Relaxed counterpart: velocities are lambda-averages over the row samples.
  void advance_relaxed(double len, const SimplexControlRow& row, double& y0, Vector& y,
                       double& nu, VecRef xi, int substeps);

private:
  void eval_relaxed(double t, const Vector& x, const SimplexControlRow& row, VecRef out);

  const ProblemSpec* spec_;
  std::vector<Vector> params_;
  Vector vals_;  // field evaluation scratch [t, x, a]
  Vector tmp_, tmp2_, k1_, k2_, k3_, k4_, ytmp_;
};

struct IntegratorOptions {
  int substeps = 1;
};

// Populates the trajectory of a strict/extended process from its controls.
Process integrate_extended(const ProblemSpec& spec, const Vector& grid,
                           const std::vector<SpaceTimeControlSample>& controls, Layer layer,
                           const IntegratorOptions& opts = {});

// Max over intervals of the one-step reintegration defect (infinity norm),
// i.e. how far the stored trajectory is from the integrator's own flow.
double dynamics_residual(const ProblemSpec& spec, const Process& proc,
                         const IntegratorOptions& opts = {});

// Uniform grid with N intervals on [0, S].
Vector uniform_grid(double S, int N);

}  // namespace gapcert

#endif  // GAPCERT_INTEGRATE_HPP
