#include "gapcert/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gapcert/lp.hpp"

namespace gapcert {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double parse_num(const std::string& s, const std::string& where) {
  std::string t = strip(s);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') throw LoadError(where + ": bad number '" + t + "'");
  return v;
}

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "g[k=" << k << ",j=(";
  for (size_t i = 0; i < j.size(); ++i) os << (i ? "," : "") << j[i];
  os << ")]";
  return os.str();
}

void PolynomialDynamics::validate() const {
  if (n <= 0 || m <= 0 || d <= 0 || q < 0)
    throw LoadError("dynamics: n, m, d must be positive and q nonnegative");
  std::vector<MultiIndex> seen;
  for (const auto& [mi, field] : coeffs) {
    if (mi.k < 1 || mi.k > d)
      throw LoadError("dynamics." + mi.str() + ": k out of range 1.." + std::to_string(d));
    if (static_cast<int>(mi.j.size()) != mi.k)
      throw LoadError("dynamics." + mi.str() + ": needs exactly k indices");
    for (size_t l = 0; l < mi.j.size(); ++l) {
      if (mi.j[l] < 1 || mi.j[l] > m)
        throw LoadError("dynamics." + mi.str() + ": index out of range 1.." + std::to_string(m));
      if (l > 0 && mi.j[l] < mi.j[l - 1])
        throw LoadError("dynamics." + mi.str() + ": multi-index not nondecreasing");
    }
    for (const auto& s : seen)
      if (s == mi) throw LoadError("dynamics." + mi.str() + ": duplicate multi-index");
    seen.push_back(mi);
    if (field.out_dim() != n) throw LoadError("dynamics." + mi.str() + ": field dimension != n");
  }
}

ControlCone ControlCone::all_free(int m) {
  ControlCone c;
  c.sign_form = true;
  c.sign.assign(m, Sign::Free);
  return c;
}

bool ControlCone::contains(const Vector& w, double tol) const {
  if (sign_form) {
    for (int i = 0; i < w.size(); ++i) {
      switch (sign[i]) {
        case Sign::Free:
          break;
        case Sign::NonNeg:
          if (w[i] < -tol) return false;
          break;
        case Sign::NonPos:
          if (w[i] > tol) return false;
          break;
        case Sign::Zero:
          if (std::abs(w[i]) > tol) return false;
          break;
      }
    }
    return true;
  }
  // Ray form: w in cone{r_1..r_R}  iff  exists c >= 0 with R c = w.
  LinearProgram lp(static_cast<int>(rays.cols()));
  for (int i = 0; i < w.size(); ++i) {
    Vector row = rays.row(i).transpose();
    lp.add_row(row, w[i], /*equality=*/true);
  }
  return lp.feasible();
}

bool TargetSet::contains(double t, const Vector& x, double tol) const {
  Vector z(1 + x.size());
  z[0] = t;
  z.tail(x.size()) = x;
  return C.rows() == 0 || ((C * z - b).array() <= tol).all();
}

double TargetSet::distance(double t, const Vector& x) const {
  const int dim = 1 + static_cast<int>(x.size());
  Vector z(dim);
  z[0] = t;
  z.tail(x.size()) = x;
  if (has_box) {
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      double excess = std::max({lo[i] - z[i], z[i] - hi[i], 0.0});
      d2 += excess * excess;
    }
    return std::sqrt(d2);
  }
  if (contains(t, x, 0.0)) return 0.0;
  // Projection onto {C z <= b} by enumeration of candidate active sets; exact
  // at the row counts this toolkit deals with.
  const int rows = static_cast<int>(C.rows());
  double best = kInf;
  std::vector<int> idx(rows);
  for (int i = 0; i < rows; ++i) idx[i] = i;
  const int max_active = std::min(rows, dim);
  std::vector<int> subset;
  // Iterate over all subsets with |subset| in 1..max_active via bitmask.
  for (unsigned mask = 1; mask < (1u << rows); ++mask) {
    int cnt = __builtin_popcount(mask);
    if (cnt > max_active) continue;
    subset.clear();
    for (int i = 0; i < rows; ++i)
      if (mask & (1u << i)) subset.push_back(i);
    Matrix Ca(cnt, dim);
    Vector ba(cnt);
    for (int r = 0; r < cnt; ++r) {
      Ca.row(r) = C.row(subset[r]);
      ba[r] = b[subset[r]];
    }
    // Projection of z onto {Ca y = ba}: y = z - Ca^T (Ca Ca^T)^+ (Ca z - ba).
    Matrix gram = Ca * Ca.transpose();
    Eigen::FullPivLU<Matrix> lu(gram);
    if (lu.rank() < cnt) continue;
    Vector mult = lu.solve(Ca * z - ba);
    if ((mult.array() < -1e-10).any()) continue;  // KKT sign
    Vector y = z - Ca.transpose() * mult;
    if (((C * y - b).array() > 1e-9).any()) continue;
    best = std::min(best, (y - z).norm());
  }
  if (!std::isfinite(best)) throw NumericError("target projection failed (degenerate rows)");
  return best;
}

bool TargetSet::nonempty() const {
  if (has_box) {
    for (int i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) return false;
    return true;
  }
  if (C.rows() == 0) return true;
  // Feasibility of C z <= b with free z: split z = zp - zm, zp, zm >= 0.
  const int dim = static_cast<int>(C.cols());
  LinearProgram lp(2 * dim);
  for (int r = 0; r < C.rows(); ++r) {
    Vector row(2 * dim);
    row.head(dim) = C.row(r).transpose();
    row.tail(dim) = -C.row(r).transpose();
    lp.add_row(row, b[r], /*equality=*/false);
  }
  return lp.feasible();
}

void ProblemSpec::validate() const {
  dyn.validate();
  if (static_cast<int>(x0.size()) != dyn.n) throw LoadError("init.x0: needs n entries");
  if (cone.sign_form && static_cast<int>(cone.sign.size()) != dyn.m)
    throw LoadError("cone: sign pattern needs m entries");
  if (dyn.q > 0 && param_set.rows() != dyn.q) throw LoadError("param_set: points need q entries");
  if (param_set.cols() < 1) throw LoadError("param_set: needs at least one point (or q=0)");
  if (!target.nonempty()) throw LoadError("target: empty target polyhedron");
  if (horizon <= 0.0) throw LoadError("horizon.bound: must be positive");
  if (budget <= 0.0) throw LoadError("budget.K: must be positive");
  if (h_generators.empty()) throw LoadError("constraint: needs at least one gradient generator");
  // Probe h and psi at the initial point.
  double h0 = h.eval(0.0, x0);
  double c0 = cost.eval(0.0, x0, 0.0);
  if (!std::isfinite(h0) || !std::isfinite(c0))
    throw LoadError("constraint/cost: non-finite at the initial point");
}

void SpaceTimeControlSample::validate(const ProblemSpec& spec, double tol) const {
  if (static_cast<int>(w.size()) != spec.m())
    throw InvariantError("control sample: w needs m entries");
  if (w0 < -tol) throw InvariantError("control sample: w0 negative");
  double ident = pow_int(w0, spec.d()) + pow_int(w.norm(), spec.d());
  if (std::abs(ident - 1.0) > tol)
    throw InvariantError("control sample: (w0)^d + |w|^d != 1 (got " + std::to_string(ident) + ")");
  if (!spec.cone.contains(w, 1e-9))
    throw InvariantError("control sample: w outside cone U");
  if (a_index < 0 || a_index >= spec.num_params())
    throw InvariantError("control sample: a_index out of range");
}

void SimplexControlRow::validate(const ProblemSpec& spec, double tol) const {
  const int count = spec.n() + 1;
  if (static_cast<int>(rows.size()) != count)
    throw InvariantError("simplex row: needs n+1 control samples");
  if (static_cast<int>(lambda.size()) != count)
    throw InvariantError("simplex row: lambda needs n+1 entries");
  if ((lambda.array() < -tol).any())
    throw InvariantError("simplex row: negative weight");
  if (std::abs(lambda.sum() - 1.0) > tol)
    throw InvariantError("simplex row: weights do not sum to 1");
  for (const auto& r : rows) r.validate(spec);
}

std::string layer_name(Layer layer) {
  switch (layer) {
    case Layer::Strict:
      return "strict";
    case Layer::Extended:
      return "extended";
    case Layer::Relaxed:
      return "relaxed";
  }
  return "?";
}

void Process::validate(const ProblemSpec& spec) const {
  const int N = intervals();
  if (N < 1) throw InvariantError("process: needs at least one interval");
  if (std::abs(grid[0]) > 1e-12) throw InvariantError("process: grid must start at 0");
  for (int i = 0; i < N; ++i)
    if (grid[i + 1] <= grid[i]) throw InvariantError("process: grid not strictly increasing");
  if (traj.rows() != N + 1 || traj.cols() != 2 + spec.n())
    throw InvariantError("process: trajectory shape mismatch");
  if (!traj.allFinite()) throw InvariantError("process: non-finite trajectory");
  if (layer == Layer::Relaxed) {
    if (static_cast<int>(simplex.size()) != N)
      throw InvariantError("process: needs one simplex row per interval");
    for (const auto& row : simplex) row.validate(spec);
    if (xi.rows() != N + 1 || xi.cols() != spec.n() + 1)
      throw InvariantError("process: xi shape mismatch");
  } else {
    if (static_cast<int>(controls.size()) != N)
      throw InvariantError("process: needs one control per interval");
    for (const auto& c : controls) {
      c.validate(spec);
      if (layer == Layer::Strict && c.w0 <= 0.0)
        throw InvariantError("process: strict layer requires w0 > 0");
    }
  }
  if (std::abs(traj(0, 0)) > 1e-12 || std::abs(traj(0, traj.cols() - 1)) > 1e-12)
    throw InvariantError("process: y0(0) and nu(0) must vanish");
  for (int i = 0; i < N; ++i) {
    if (traj(i + 1, 0) < traj(i, 0) - 1e-10)
      throw InvariantError("process: y0 must be nondecreasing");
    if (traj(i + 1, traj.cols() - 1) < traj(i, traj.cols() - 1) - 1e-10)
      throw InvariantError("process: nu must be nondecreasing");
  }
}

Vector eval_extended_dynamics(const ProblemSpec& spec, double t, const Vector& x,
                              const SpaceTimeControlSample& sample) {
  const auto& dyn = spec.dyn;
  Vector a = spec.param(sample.a_index);
  Vector out(dyn.n), tmp(dyn.n);
  dyn.drift.eval(t, x, a, out);
  out *= pow_int(sample.w0, dyn.d);
  for (const auto& [mi, field] : dyn.coeffs) {
    double mono = pow_int(sample.w0, dyn.d - mi.k);
    for (int jl : mi.j) mono *= sample.w[jl - 1];
    if (mono == 0.0) continue;
    field.eval(t, x, a, tmp);
    out += mono * tmp;
  }
  if (!out.allFinite()) throw NumericError("extended dynamics evaluated non-finite");
  return out;
}

Vector eval_fast_dynamics(const ProblemSpec& spec, double t, const Vector& x, const Vector& w) {
  SpaceTimeControlSample s;
  s.w0 = 0.0;
  s.w = w;
  s.a_index = 0;
  return eval_extended_dynamics(spec, t, x, s);
}

void extended_dynamics_jac_x(const ProblemSpec& spec, double t, const Vector& x,
                             const SpaceTimeControlSample& sample, Matrix& jac) {
  const auto& dyn = spec.dyn;
  Vector a = spec.param(sample.a_index);
  Matrix tmp;
  dyn.drift.jac_x(t, x, a, jac);
  jac *= pow_int(sample.w0, dyn.d);
  for (const auto& [mi, field] : dyn.coeffs) {
    double mono = pow_int(sample.w0, dyn.d - mi.k);
    for (int jl : mi.j) mono *= sample.w[jl - 1];
    if (mono == 0.0) continue;
    field.jac_x(t, x, a, tmp);
    jac += mono * tmp;
  }
}

Vector extended_dynamics_dt(const ProblemSpec& spec, double t, const Vector& x,
                            const SpaceTimeControlSample& sample) {
  const auto& dyn = spec.dyn;
  Vector a = spec.param(sample.a_index);
  Vector out(dyn.n), tmp(dyn.n);
  dyn.drift.dt(t, x, a, out);
  out *= pow_int(sample.w0, dyn.d);
  for (const auto& [mi, field] : dyn.coeffs) {
    double mono = pow_int(sample.w0, dyn.d - mi.k);
    for (int jl : mi.j) mono *= sample.w[jl - 1];
    if (mono == 0.0) continue;
    field.dt(t, x, a, tmp);
    out += mono * tmp;
  }
  return out;
}

FeasibilityRecord check_feasibility(const ProblemSpec& spec, const Process& proc, double /*tol*/) {
  FeasibilityRecord rec;
  const int N = proc.intervals();
  for (int i = 0; i <= N; ++i) {
    double hv = spec.h.eval(proc.y0(i), proc.y(i));
    rec.max_constraint_violation = std::max(rec.max_constraint_violation, hv);
  }
  rec.max_constraint_violation = std::max(rec.max_constraint_violation, 0.0);
  rec.target_distance = spec.target.distance(proc.y0(N), proc.y(N));
  if (std::isfinite(spec.budget))
    rec.budget_excess = std::max(proc.nu(N) - spec.budget, 0.0);
  return rec;
}

// ---------------------------------------------------------------------------
// Problem file parsing
// ---------------------------------------------------------------------------

namespace {

struct RawTarget {
  std::vector<std::pair<int, std::pair<double, double>>> boxes;  // coord -> (lo,hi)
  std::vector<std::pair<Vector, double>> rows;
};

void finalize_target(TargetSet& tgt, const RawTarget& raw, int n) {
  const int dim = 1 + n;
  std::vector<Vector> crows;
  std::vector<double> crhs;
  if (!raw.boxes.empty() && raw.rows.empty()) {
    tgt.has_box = true;
    tgt.lo = Vector::Constant(dim, -kInf);
    tgt.hi = Vector::Constant(dim, kInf);
    for (const auto& [coord, bounds] : raw.boxes) {
      tgt.lo[coord] = bounds.first;
      tgt.hi[coord] = bounds.second;
    }
  }
  for (const auto& [coord, bounds] : raw.boxes) {
    if (std::isfinite(bounds.second)) {
      Vector r = Vector::Zero(dim);
      r[coord] = 1.0;
      crows.push_back(r);
      crhs.push_back(bounds.second);
    }
    if (std::isfinite(bounds.first)) {
      Vector r = Vector::Zero(dim);
      r[coord] = -1.0;
      crows.push_back(r);
      crhs.push_back(-bounds.first);
    }
  }
  for (const auto& [row, rhs] : raw.rows) {
    crows.push_back(row);
    crhs.push_back(rhs);
  }
  tgt.C.resize(crows.size(), dim);
  tgt.b.resize(crows.size());
  for (size_t i = 0; i < crows.size(); ++i) {
    tgt.C.row(i) = crows[i].transpose();
    tgt.b[i] = crhs[i];
  }
}

}  // namespace

ProblemSpec parse_problem(const std::string& text, const std::string& origin) {
  ProblemSpec spec;
  spec.name = origin;
  RawTarget raw_target;
  std::vector<Vector> param_points;
  std::vector<std::string> ray_lines;
  std::vector<std::string> generator_ctors;
  std::string h_expr = "-1";
  std::string cost_expr;
  bool have_cost = false;

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  // Deferred dynamics lines; fields are constructed once n,m,q,d are known.
  std::vector<std::pair<int, std::string>> dyn_lines;

  while (std::getline(in, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw LoadError(origin + ":" + std::to_string(lineno) + ": bad section");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const std::string where = origin + ":" + std::to_string(lineno);
    if (section == "dynamics") {
      dyn_lines.emplace_back(lineno, line);
    } else if (section == "cone") {
      if (line.rfind("sign", 0) == 0) {
        auto toks = tokens(line.substr(line.find('=') + 1));
        spec.cone.sign_form = true;
        spec.cone.sign.clear();
        for (auto& t : toks) {
          if (t == "free")
            spec.cone.sign.push_back(ControlCone::Sign::Free);
          else if (t == "nonneg")
            spec.cone.sign.push_back(ControlCone::Sign::NonNeg);
          else if (t == "nonpos")
            spec.cone.sign.push_back(ControlCone::Sign::NonPos);
          else if (t == "zero")
            spec.cone.sign.push_back(ControlCone::Sign::Zero);
          else
            throw LoadError(where + ": cone.sign: unknown token '" + t + "'");
        }
      } else if (line.rfind("ray", 0) == 0) {
        ray_lines.push_back(line.substr(line.find('=') + 1));
      } else {
        throw LoadError(where + ": cone: expected 'sign =' or 'ray ='");
      }
    } else if (section == "constraint") {
      if (line.rfind("h", 0) == 0 && line.find('=') != std::string::npos &&
          strip(line.substr(0, line.find('='))) == "h") {
        h_expr = strip(line.substr(line.find('=') + 1));
      } else if (line.rfind("generator", 0) == 0) {
        generator_ctors.push_back(strip(line.substr(line.find('=') + 1)));
      } else {
        throw LoadError(where + ": constraint: expected 'h =' or 'generator ='");
      }
    } else if (section == "target") {
      auto toks = tokens(line);
      if (toks.size() >= 2 && toks[0] == "box") {
        // box t = lo hi ; box x<i> = lo hi
        if (toks.size() != 5 || toks[2] != "=")
          throw LoadError(where + ": target.box: expected 'box <coord> = lo hi'");
        int coord;
        if (toks[1] == "t")
          coord = 0;
        else if (toks[1].size() > 1 && toks[1][0] == 'x')
          coord = std::atoi(toks[1].c_str() + 1);
        else
          throw LoadError(where + ": target.box: unknown coordinate '" + toks[1] + "'");
        raw_target.boxes.push_back(
            {coord, {parse_num(toks[3], where), parse_num(toks[4], where)}});
      } else if (!toks.empty() && toks[0] == "row") {
        // row c0 c1 .. cn <= b
        auto le = std::find(toks.begin(), toks.end(), "<=");
        if (le == toks.end() || le + 2 != toks.end())
          throw LoadError(where + ": target.row: expected 'row c0 .. cn <= b'");
        Vector r(le - toks.begin() - 1);
        for (int i = 0; i < r.size(); ++i) r[i] = parse_num(toks[1 + i], where);
        raw_target.rows.push_back({r, parse_num(*(le + 1), where)});
      } else {
        throw LoadError(where + ": target: expected 'box' or 'row'");
      }
    } else if (section == "cost") {
      if (line.rfind("psi", 0) == 0) {
        cost_expr = strip(line.substr(line.find('=') + 1));
        have_cost = true;
      } else {
        throw LoadError(where + ": cost: expected 'psi ='");
      }
    } else if (section == "budget") {
      spec.budget = parse_num(line.substr(line.find('=') + 1), where);
    } else if (section == "init") {
      auto toks = tokens(line.substr(line.find('=') + 1));
      spec.x0.resize(toks.size());
      for (size_t i = 0; i < toks.size(); ++i) spec.x0[i] = parse_num(toks[i], where);
    } else if (section == "horizon") {
      spec.horizon = parse_num(line.substr(line.find('=') + 1), where);
    } else if (section == "param_set") {
      auto toks = tokens(line.substr(line.find('=') + 1));
      Vector p(toks.size());
      for (size_t i = 0; i < toks.size(); ++i) p[i] = parse_num(toks[i], where);
      param_points.push_back(p);
    } else if (section.empty() && line.rfind("name", 0) == 0) {
      spec.name = strip(line.substr(line.find('=') + 1));
    } else {
      throw LoadError(where + ": content outside a known section");
    }
  }

  // First pass over dynamics lines: scalar keys.
  auto& dyn = spec.dyn;
  std::string drift_ctor;
  std::vector<std::tuple<int, MultiIndex, std::string>> g_specs;
  for (const auto& [ln, dline] : dyn_lines) {
    const std::string where = origin + ":" + std::to_string(ln);
    if (dline.rfind("g ", 0) == 0 || dline.rfind("g\t", 0) == 0) {
      MultiIndex mi;
      std::string field_ctor;
      auto toks = tokens(dline);
      for (size_t ti = 1; ti < toks.size(); ++ti) {
        const std::string& t = toks[ti];
        if (t.rfind("k=", 0) == 0) {
          mi.k = std::atoi(t.c_str() + 2);
        } else if (t.rfind("j=", 0) == 0) {
          std::istringstream js(t.substr(2));
          std::string piece;
          while (std::getline(js, piece, ',')) mi.j.push_back(std::atoi(piece.c_str()));
        } else if (t.rfind("field=", 0) == 0) {
          // The constructor may contain spaces; recover the raw tail.
          size_t pos = dline.find("field=");
          field_ctor = strip(dline.substr(pos + 6));
          break;
        } else {
          throw LoadError(where + ": dynamics.g: unknown token '" + t + "'");
        }
      }
      if (mi.k == 0 || field_ctor.empty())
        throw LoadError(where + ": dynamics.g: needs k=, j=, field=");
      g_specs.emplace_back(ln, mi, field_ctor);
    } else {
      size_t eq = dline.find('=');
      if (eq == std::string::npos) throw LoadError(where + ": dynamics: expected key = value");
      std::string key = strip(dline.substr(0, eq));
      std::string val = strip(dline.substr(eq + 1));
      if (key == "n")
        dyn.n = std::atoi(val.c_str());
      else if (key == "m")
        dyn.m = std::atoi(val.c_str());
      else if (key == "q")
        dyn.q = std::atoi(val.c_str());
      else if (key == "d")
        dyn.d = std::atoi(val.c_str());
      else if (key == "drift")
        drift_ctor = val;
      else
        throw LoadError(where + ": dynamics: unknown key '" + key + "'");
    }
  }
  if (dyn.n <= 0 || dyn.m <= 0 || dyn.d <= 0)
    throw LoadError(origin + ": dynamics: n, m, d must be set and positive");

  dyn.drift = drift_ctor.empty() ? VectorField::make("zero()", dyn.n, dyn.q)
                                 : VectorField::make(drift_ctor, dyn.n, dyn.q);
  for (const auto& [ln, mi, ctor] : g_specs) {
    const std::string where = origin + ":" + std::to_string(ln);
    try {
      dyn.coeffs.emplace_back(mi, VectorField::make(ctor, dyn.n, 0));
    } catch (const LoadError& e) {
      throw LoadError(where + ": " + e.what());
    }
  }

  if (spec.cone.sign_form && spec.cone.sign.empty()) spec.cone = ControlCone::all_free(dyn.m);
  if (!ray_lines.empty()) {
    spec.cone.sign_form = false;
    spec.cone.rays.resize(dyn.m, ray_lines.size());
    for (size_t r = 0; r < ray_lines.size(); ++r) {
      auto toks = tokens(ray_lines[r]);
      if (static_cast<int>(toks.size()) != dyn.m)
        throw LoadError(origin + ": cone.ray: needs m entries");
      for (int i = 0; i < dyn.m; ++i) spec.cone.rays(i, r) = parse_num(toks[i], "cone.ray");
    }
  }

  spec.h = ScalarField::parse(h_expr, dyn.n);
  if (generator_ctors.empty()) {
    spec.h_smooth = true;
    spec.h_generators.push_back(VectorField::gradient_of(spec.h.poly, dyn.n));
  } else {
    spec.h_smooth = false;
    for (const auto& ctor : generator_ctors)
      spec.h_generators.push_back(VectorField::make(ctor, dyn.n, 0, 1 + dyn.n));
  }

  finalize_target(spec.target, raw_target, dyn.n);
  if (!have_cost) throw LoadError(origin + ": cost: psi is required");
  spec.cost = CostField::parse(cost_expr, dyn.n);

  if (dyn.q == 0) {
    spec.param_set.resize(0, 1);
  } else {
    if (param_points.empty()) throw LoadError(origin + ": param_set: q > 0 needs grid points");
    spec.param_set.resize(dyn.q, param_points.size());
    for (size_t i = 0; i < param_points.size(); ++i) {
      if (param_points[i].size() != dyn.q)
        throw LoadError(origin + ": param_set: point needs q entries");
      spec.param_set.col(i) = param_points[i];
    }
  }

  spec.validate();
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot open problem file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_problem(ss.str(), path);
}

}  // namespace gapcert
