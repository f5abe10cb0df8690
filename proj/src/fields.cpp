#include "gapcert/fields.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace gapcert {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

int find_var(const std::vector<std::string>& names, const std::string& tok) {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == tok) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> var_layout_tx(int n) {
  std::vector<std::string> names{"t"};
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

}  // namespace

double ScalarPoly::eval(const Vector& vals) const {
  double r = 0.0;
  for (const Term& term : terms) {
    double m = term.coeff;
    for (auto [vi, pw] : term.factors) {
      double v = vals[vi];
      for (int p = 0; p < pw; ++p) m *= v;
    }
    r += m;
  }
  return r;
}

void ScalarPoly::grad(const Vector& vals, VecRef g) const {
  g.setZero();
  for (const Term& term : terms) {
    for (size_t k = 0; k < term.factors.size(); ++k) {
      auto [vk, pk] = term.factors[k];
      double m = term.coeff * pk;
      for (int p = 0; p < pk - 1; ++p) m *= vals[vk];
      for (size_t l = 0; l < term.factors.size(); ++l) {
        if (l == k) continue;
        auto [vl, pl] = term.factors[l];
        for (int p = 0; p < pl; ++p) m *= vals[vl];
      }
      g[vk] += m;
    }
  }
}

ScalarPoly ScalarPoly::derivative(int var) const {
  ScalarPoly out;
  out.nvars = nvars;
  for (const Term& term : terms) {
    for (size_t k = 0; k < term.factors.size(); ++k) {
      auto [vk, pk] = term.factors[k];
      if (vk != var) continue;
      Term dt;
      dt.coeff = term.coeff * pk;
      for (size_t l = 0; l < term.factors.size(); ++l) {
        auto [vl, pl] = term.factors[l];
        int p = (l == k) ? pl - 1 : pl;
        if (p > 0) dt.factors.emplace_back(vl, p);
      }
      out.terms.push_back(std::move(dt));
    }
  }
  return out;
}

ScalarPoly ScalarPoly::parse(const std::string& expr, const std::vector<std::string>& var_names) {
  ScalarPoly poly;
  poly.nvars = static_cast<int>(var_names.size());
  // Split into signed terms at top-level +/-.
  std::string s = strip(expr);
  if (s.empty()) return poly;  // zero polynomial
  std::vector<std::pair<int, std::string>> raw;  // (sign, term text)
  int sign = +1;
  std::string cur;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool at_term_start = cur.empty() || strip(cur).empty();
    if ((c == '+' || c == '-') && !at_term_start && !(i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E'))) {
      raw.emplace_back(sign, cur);
      sign = (c == '-') ? -1 : +1;
      cur.clear();
    } else if ((c == '+' || c == '-') && at_term_start) {
      if (c == '-') sign = -sign;
    } else {
      cur.push_back(c);
    }
  }
  raw.emplace_back(sign, cur);

  for (auto& [sg, text] : raw) {
    std::string body = strip(text);
    if (body.empty()) throw LoadError("poly parse: empty term in '" + expr + "'");
    Term term;
    term.coeff = sg;
    for (std::string factor : split(body, '*')) {
      factor = strip(factor);
      if (factor.empty()) throw LoadError("poly parse: empty factor in '" + expr + "'");
      std::string base = factor;
      int power = 1;
      if (size_t caret = factor.find('^'); caret != std::string::npos) {
        base = strip(factor.substr(0, caret));
        std::string ps = strip(factor.substr(caret + 1));
        char* end = nullptr;
        power = static_cast<int>(std::strtol(ps.c_str(), &end, 10));
        if (end == ps.c_str() || *end != '\0' || power < 1)
          throw LoadError("poly parse: bad exponent '" + ps + "'");
      }
      int vi = find_var(var_names, base);
      if (vi >= 0) {
        bool merged = false;
        for (auto& f : term.factors)
          if (f.first == vi) {
            f.second += power;
            merged = true;
            break;
          }
        if (!merged) term.factors.emplace_back(vi, power);
      } else {
        char* end = nullptr;
        double c = std::strtod(base.c_str(), &end);
        if (end == base.c_str() || *end != '\0')
          throw LoadError("poly parse: unknown symbol '" + base + "' in '" + expr + "'");
        for (int p = 0; p < power; ++p) term.coeff *= c;
        continue;
      }
    }
    poly.terms.push_back(std::move(term));
  }
  return poly;
}

void VectorField::eval(double t, const Vector& x, const Vector& a, VecRef out) const {
  Vector vals;
  eval_scratch(vals, t, x, a, out);
}

void VectorField::eval_scratch(Vector& vals, double t, const Vector& x, const Vector& a,
                               VecRef out) const {
  if (kind_ == Kind::Tent) {
    out.setZero();
    double r = 1.0 - std::abs(4.0 * x[tent_src_] - 2.0);
    out[tent_dst_] = tent_scale_ * (r > 0.0 ? r : 0.0);
    return;
  }
  vals.resize(1 + n_ + q_);
  vals[0] = t;
  vals.segment(1, n_) = x;
  if (q_ > 0) vals.segment(1 + n_, q_) = a;
  for (int i = 0; i < out_dim_; ++i) out[i] = comps_[i].eval(vals);
  if (!out.allFinite()) throw NumericError("field '" + desc_ + "' evaluated non-finite");
}

void VectorField::jac_x(double t, const Vector& x, const Vector& a, Matrix& jac) const {
  jac.setZero(out_dim_, n_);
  if (kind_ == Kind::Tent) {
    // a.e. derivative of the tent; the kink selections at r in {1/4,1/2,3/4}
    // use the left branch.
    double u = 4.0 * x[tent_src_] - 2.0;
    double d = 0.0;
    if (std::abs(u) < 1.0) d = (u >= 0.0 ? -4.0 : 4.0) * tent_scale_;
    jac(tent_dst_, tent_src_) = d;
    return;
  }
  Vector vals(1 + n_ + q_), g(1 + n_ + q_);
  vals[0] = t;
  vals.segment(1, n_) = x;
  if (q_ > 0) vals.segment(1 + n_, q_) = a;
  for (int i = 0; i < out_dim_; ++i) {
    comps_[i].grad(vals, g);
    jac.row(i) = g.segment(1, n_).transpose();
  }
}

void VectorField::dt(double t, const Vector& x, const Vector& a, VecRef out) const {
  if (kind_ == Kind::Tent) {
    out.setZero();
    return;
  }
  Vector vals(1 + n_ + q_), g(1 + n_ + q_);
  vals[0] = t;
  vals.segment(1, n_) = x;
  if (q_ > 0) vals.segment(1 + n_, q_) = a;
  for (int i = 0; i < out_dim_; ++i) {
    comps_[i].grad(vals, g);
    out[i] = g[0];
  }
}

VectorField VectorField::make(const std::string& spec_text, int n, int q, int out_dim) {
  std::string s = strip(spec_text);
  size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw LoadError("field constructor must look like name(...): '" + s + "'");
  std::string name = strip(s.substr(0, open));
  std::string args = s.substr(open + 1, s.size() - open - 2);

  VectorField f;
  f.n_ = n;
  f.q_ = q;
  f.out_dim_ = out_dim < 0 ? n : out_dim;
  f.desc_ = s;
  const int nd = f.out_dim_;

  std::vector<std::string> var_names = var_layout_tx(n);
  for (int j = 1; j <= q; ++j) var_names.push_back("a" + std::to_string(j));

  if (name == "const") {
    auto parts = split(args, ',');
    if (static_cast<int>(parts.size()) != nd)
      throw LoadError("const(...) needs " + std::to_string(nd) + " entries, got " +
                      std::to_string(parts.size()));
    for (auto& p : parts) f.comps_.push_back(ScalarPoly::parse(strip(p), var_names));
  } else if (name == "poly") {
    auto parts = split(args, ';');
    if (static_cast<int>(parts.size()) != nd)
      throw LoadError("poly(...) needs " + std::to_string(nd) + " components, got " +
                      std::to_string(parts.size()));
    for (auto& p : parts) f.comps_.push_back(ScalarPoly::parse(strip(p), var_names));
  } else if (name == "affine") {
    // affine(b1,..,bn ; a11,..,a1n ; ... ; an1,..,ann): b + A x
    auto blocks = split(args, ';');
    if (static_cast<int>(blocks.size()) != nd + 1)
      throw LoadError("affine(...) needs 1 offset block and one row block per component");
    auto offs = split(blocks[0], ',');
    if (static_cast<int>(offs.size()) != nd) throw LoadError("affine offset block has wrong size");
    for (int i = 0; i < nd; ++i) {
      auto row = split(blocks[1 + i], ',');
      if (static_cast<int>(row.size()) != n) throw LoadError("affine row block must have n entries");
      std::ostringstream expr;
      expr << strip(offs[i]);
      for (int j = 0; j < n; ++j) {
        expr << " + " << strip(row[j]) << "*x" << (j + 1);
      }
      f.comps_.push_back(ScalarPoly::parse(expr.str(), var_names));
    }
  } else if (name == "zero") {
    for (int i = 0; i < nd; ++i) f.comps_.push_back(ScalarPoly::parse("", var_names));
  } else if (name == "tent") {
    // tent(src, dst, scale): out[dst] = scale * max(0, 1 - |4 x_src - 2|)
    auto parts = split(args, ',');
    if (parts.size() != 3) throw LoadError("tent(src,dst,scale) needs 3 arguments");
    f.kind_ = Kind::Tent;
    f.tent_src_ = std::atoi(strip(parts[0]).c_str()) - 1;
    f.tent_dst_ = std::atoi(strip(parts[1]).c_str()) - 1;
    f.tent_scale_ = std::strtod(strip(parts[2]).c_str(), nullptr);
    if (f.tent_src_ < 0 || f.tent_src_ >= n || f.tent_dst_ < 0 || f.tent_dst_ >= nd)
      throw LoadError("tent(src,dst,scale): component index out of range");
  } else {
    throw LoadError("unknown field constructor '" + name + "'");
  }
  return f;
}

VectorField VectorField::gradient_of(const ScalarPoly& h, int n) {
  VectorField f;
  f.kind_ = Kind::Poly;
  f.n_ = n;
  f.q_ = 0;
  f.out_dim_ = 1 + n;
  f.desc_ = "grad(h)";
  for (int v = 0; v < 1 + n; ++v) f.comps_.push_back(h.derivative(v));
  return f;
}

double ScalarField::eval(double t, const Vector& x) const {
  Vector vals(1 + n);
  vals[0] = t;
  vals.segment(1, n) = x;
  return poly.eval(vals);
}

void ScalarField::grad(double t, const Vector& x, VecRef g) const {
  Vector vals(1 + n);
  vals[0] = t;
  vals.segment(1, n) = x;
  poly.grad(vals, g);
}

ScalarField ScalarField::parse(const std::string& expr, int n) {
  ScalarField f;
  f.n = n;
  f.desc = strip(expr);
  f.poly = ScalarPoly::parse(expr, var_layout_tx(n));
  return f;
}

double CostField::eval(double t, const Vector& x, double v) const {
  Vector vals(1 + n + 1);
  vals[0] = t;
  vals.segment(1, n) = x;
  vals[1 + n] = v;
  return poly.eval(vals);
}

void CostField::grad(double t, const Vector& x, double v, VecRef g) const {
  Vector vals(1 + n + 1);
  vals[0] = t;
  vals.segment(1, n) = x;
  vals[1 + n] = v;
  poly.grad(vals, g);
}

CostField CostField::parse(const std::string& expr, int n) {
  CostField f;
  f.n = n;
  f.desc = strip(expr);
  auto names = var_layout_tx(n);
  names.push_back("v");
  f.poly = ScalarPoly::parse(expr, names);
  return f;
}

}  // namespace gapcert
