#ifndef GAPCERT_POLYHEDRAL_HPP
#define GAPCERT_POLYHEDRAL_HPP

#include "gapcert/types.hpp"

namespace gapcert {

// Euclidean distance of v to the finitely generated cone {G b : b >= 0}
// (columns of G are the generators). Lawson-Hanson nonnegative least squares;
// the minimizing coefficients are returned through beta when given.
double cone_distance(const Matrix& G, const Vector& v, Vector* beta = nullptr);

}  // namespace gapcert

#endif  // GAPCERT_POLYHEDRAL_HPP
