#ifndef GAPCERT_EMBED_HPP
#define GAPCERT_EMBED_HPP

#include <vector>

#include "gapcert/model.hpp"

namespace gapcert {

// Original-problem process: real time t on [0,T], unbounded control u in U,
// trajectory x and running control energy v with v(0) = 0.
struct OriginalProcess {
  double T = 0.0;
  Vector grid;                // M+1 nodes on [0,T]
  std::vector<Vector> u;      // M per-interval controls
  std::vector<int> a_index;   // M per-interval parameter indices
  Matrix traj;                // (M+1) x (n+1), columns (x, v)

  int intervals() const { return static_cast<int>(grid.size()) - 1; }
  Vector x(int node) const { return traj.row(node).head(traj.cols() - 1).transpose(); }
  double v(int node) const { return traj(node, traj.cols() - 1); }

  void validate(const ProblemSpec& spec) const;
};

// Node table of sigma(t) = t + v(t) with monotone linear-interpolation
// lookups in both directions.
struct TimeChange {
  Vector t_nodes;
  Vector s_nodes;  // sigma at the t nodes

  double sigma(double t) const;
  double inverse(double s) const;

  static TimeChange from_original(const OriginalProcess& orig);
};

// Fixed-horizon image of a free end-time process under the constant speed
// change y*(s) = (1+zeta) s.
struct RescaledProcess {
  double S_bar = 0.0;
  double zeta = 0.0;       // constant in [-delta_bar, delta_bar]
  Vector grid;             // N+1 nodes on [0, S_bar]
  Matrix traj;             // (N+1) x (1 + 2 + n): columns (y*, y0, y, nu)
};

// Integrates the original system (xdot, vdot) = (f + sum g u..., |u|^d);
// plumbing used by the CLI and by randomized tests.
OriginalProcess integrate_original(const ProblemSpec& spec, const Vector& grid,
                                   const std::vector<Vector>& u, const std::vector<int>& a_index,
                                   int substeps = 1);

// Space-time embedding: sigma(t) = t + v(t), S = sigma(T),
// (y0,y,nu) = (id,x,v) o sigma^{-1}, (w0,w) = (1+|u|^d)^{-1/d} (1,u) o sigma^{-1}.
// The image is resampled on a uniform s-grid with `nodes` intervals
// (default 2x the original count). The terminal node maps exactly, so the
// cost transports exactly.
Process embed_original(const ProblemSpec& spec, const OriginalProcess& orig, int nodes = 0);

// Inverse of the embedding on strict-sense processes: u = w/w0 reparameterized
// by t = y0(s). Requires w0 >= w0_min on every interval.
OriginalProcess invert_embedding(const ProblemSpec& spec, const Process& proc,
                                 double w0_min = 1e-6, int nodes = 0);

// Free end-time to fixed end-time: zeta = S/S_bar - 1, |zeta| <= delta_bar.
RescaledProcess rescale_free_time(double S_bar, const Process& proc, double delta_bar = 0.25);

}  // namespace gapcert

#endif  // GAPCERT_EMBED_HPP
