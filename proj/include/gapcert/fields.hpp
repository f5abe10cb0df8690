#ifndef GAPCERT_FIELDS_HPP
#define GAPCERT_FIELDS_HPP

#include <functional>
#include <string>
#include <vector>

#include "gapcert/types.hpp"

namespace gapcert {

// Sparse multivariate polynomial over a named variable list.
// Variables are addressed by index; the surrounding code fixes the layout
// (e.g. [t, x1..xn] for constraint functions, [t, x1..xn, a1..aq] for drifts).
struct ScalarPoly {
  struct Term {
    double coeff = 0.0;
    std::vector<std::pair<int, int>> factors;  // (var index, power), power >= 1
  };
  int nvars = 0;
  std::vector<Term> terms;

  double eval(const Vector& vals) const;
  // Gradient with respect to all variables, written into g (size nvars).
  void grad(const Vector& vals, VecRef g) const;
  // Exact partial derivative as a polynomial.
  ScalarPoly derivative(int var) const;

  static ScalarPoly parse(const std::string& expr, const std::vector<std::string>& var_names);
};

// Vector-valued field with analytic first derivatives. Components are stored
// as polynomials except for a few named non-polynomial constructors (tent),
// which carry their own evaluation and a.e.-derivative rules.
class VectorField {
public:
  VectorField() = default;

  int out_dim() const { return out_dim_; }
  const std::string& description() const { return desc_; }

  // Evaluates the field. `a` may be empty when the field ignores parameters.
  void eval(double t, const Vector& x, const Vector& a, VecRef out) const;
  // Same, with a caller-owned scratch buffer (hot loops; no allocation).
  void eval_scratch(Vector& vals, double t, const Vector& x, const Vector& a, VecRef out) const;
  // Jacobian with respect to x (out_dim x n).
  void jac_x(double t, const Vector& x, const Vector& a, Matrix& jac) const;
  // Partial derivative with respect to t.
  void dt(double t, const Vector& x, const Vector& a, VecRef out) const;

  // Constructors resolved from the problem-file registry. `spec_text` is the
  // constructor expression, e.g. "const(1,0,0)" or "poly(0; x2*x3; 0)".
  // n = state dim, q = parameter dim (0 when the field cannot see a).
  // out_dim defaults to n; constraint-gradient generators use 1+n.
  static VectorField make(const std::string& spec_text, int n, int q, int out_dim = -1);

  // (dh/dt, dh/dx1..dh/dxn) of a scalar constraint as a 1+n dim field.
  static VectorField gradient_of(const ScalarPoly& h, int n);

private:
  enum class Kind { Poly, Tent };
  Kind kind_ = Kind::Poly;
  int out_dim_ = 0;
  int n_ = 0;
  int q_ = 0;
  std::string desc_;
  std::vector<ScalarPoly> comps_;  // Kind::Poly, over [t, x1..xn, a1..aq]
  // Kind::Tent: out[dst] = scale * max(0, 1 - |4 x_src - 2|), zero elsewhere.
  int tent_src_ = 0;
  int tent_dst_ = 0;
  double tent_scale_ = 1.0;
};

// Scalar field over (t, x) with an analytic gradient; used for constraints.
struct ScalarField {
  ScalarPoly poly;  // over [t, x1..xn]
  int n = 0;
  std::string desc;

  double eval(double t, const Vector& x) const;
  // Gradient (dh/dt, dh/dx) of size 1+n.
  void grad(double t, const Vector& x, VecRef g) const;

  static ScalarField parse(const std::string& expr, int n);
};

// Scalar cost over (t, x, v) with analytic gradient of size 1+n+1.
struct CostField {
  ScalarPoly poly;  // over [t, x1..xn, v]
  int n = 0;
  std::string desc;

  double eval(double t, const Vector& x, double v) const;
  void grad(double t, const Vector& x, double v, VecRef g) const;

  static CostField parse(const std::string& expr, int n);
};

}  // namespace gapcert

#endif  // GAPCERT_FIELDS_HPP
