#ifndef GAPCERT_TYPES_HPP
#define GAPCERT_TYPES_HPP

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace gapcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VecRef = Eigen::Ref<Vector>;
using ConstVecRef = Eigen::Ref<const Vector>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown when a problem file or process file fails schema validation.
class LoadError : public std::runtime_error {
public:
  explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a stored object violates one of its documented invariants.
class InvariantError : public std::runtime_error {
public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on non-finite field evaluations or integrator blow-up.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a caller-supplied option is out of its documented range.
class ParameterError : public std::runtime_error {
public:
  explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

struct Tolerances {
  double feas = 1e-6;        // feasibility tolerance for constraints/targets
  double kkt = 1e-5;         // stationarity tolerance for the NLP solver
  double active = 1e-6;      // activity detection for h and target rows
  double ham_slack = 1e-6;   // slack allowed in Hamiltonian maximization rows
  double nondeg = 1e-6;      // threshold for the strengthened nontriviality value
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace gapcert

#endif  // GAPCERT_TYPES_HPP
