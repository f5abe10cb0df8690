#ifndef GAPCERT_BUILTIN_HPP
#define GAPCERT_BUILTIN_HPP

#include <string>
#include <utility>
#include <vector>

#include "gapcert/model.hpp"

namespace gapcert::builtin {

// Bundled problem files, addressable by name from the CLI.
//   ex51   — 3-state control-polynomial instance with the state constraint
//            x1 <= 1 active at the start and target {1} x [-1,0] x [0,1]^2.
//   lq     — scalar reach problem min x(1)^2 with xdot = u, |u| <= 1 realized
//            as the strict layer with w0 floor 1/2.
//   isofix — tent-drift fixture whose extended reference motion needs the
//            fast dynamics; strict processes near it pile up constraint
//            violation proportional to their w0 floor.
std::vector<std::pair<std::string, std::string>> bundled_problems();
std::string problem_text(const std::string& name);

ProblemSpec ex51();
ProblemSpec lq();
ProblemSpec isofix();

// Reference extended process of ex51: controls (1,(0,0)) on [0,1] and
// (0,(-1,0)) on ]1,2], integrated on a uniform grid with N intervals (N even).
Process ex51_reference(int N);
// Closed-form node values of that trajectory: rows (y0, y1, y2, y3, nu).
Matrix ex51_reference_exact(const Vector& grid);

// Reference extended process of isofix: pure fast arc w = +1 on [0,1].
Process isofix_reference(int N);

}  // namespace gapcert::builtin

#endif  // GAPCERT_BUILTIN_HPP
