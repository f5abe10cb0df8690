#include "gapcert/polyhedral.hpp"

#include <cmath>
#include <vector>

namespace gapcert {

double cone_distance(const Matrix& G, const Vector& v, Vector* beta_out) {
  const int ncols = static_cast<int>(G.cols());
  if (ncols == 0 || v.size() == 0) {
    if (beta_out) beta_out->resize(ncols), beta_out->setZero();
    return v.norm();
  }
  Vector beta = Vector::Zero(ncols);
  std::vector<bool> passive(ncols, false);
  const double tol = 1e-12 * (1.0 + v.norm());

  for (int round = 0; round < 4 * ncols + 16; ++round) {
    // Gradient of 1/2||G beta - v||^2 is G^T(G beta - v); candidates to enter
    // the passive set are active columns with negative gradient.
    Vector w = G.transpose() * (v - G * beta);
    int enter = -1;
    double best = tol;
    for (int j = 0; j < ncols; ++j)
      if (!passive[j] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    if (enter < 0) break;
    passive[enter] = true;

    // Inner loop: least squares on the passive set, stepping back while any
    // passive coefficient would go negative.
    for (int inner = 0; inner < 4 * ncols + 16; ++inner) {
      std::vector<int> idx;
      for (int j = 0; j < ncols; ++j)
        if (passive[j]) idx.push_back(j);
      Matrix Gp(v.size(), idx.size());
      for (size_t c = 0; c < idx.size(); ++c) Gp.col(c) = G.col(idx[c]);
      Vector z = Gp.colPivHouseholderQr().solve(v);
      bool ok = true;
      for (int c = 0; c < z.size(); ++c)
        if (z[c] <= 0.0) ok = false;
      if (ok) {
        beta.setZero();
        for (size_t c = 0; c < idx.size(); ++c) beta[idx[c]] = z[c];
        break;
      }
      double alpha = 1.0;
      for (size_t c = 0; c < idx.size(); ++c)
        if (z[c] <= 0.0) {
          double bj = beta[idx[c]];
          if (bj - z[c] > 0.0) alpha = std::min(alpha, bj / (bj - z[c]));
        }
      for (size_t c = 0; c < idx.size(); ++c) {
        double nb = beta[idx[c]] + alpha * (z[c] - beta[idx[c]]);
        beta[idx[c]] = nb;
        if (nb <= tol) {
          passive[idx[c]] = false;
          beta[idx[c]] = 0.0;
        }
      }
    }
  }
  if (beta_out) *beta_out = beta;
  return (G * beta - v).norm();
}

}  // namespace gapcert
