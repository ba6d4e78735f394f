// SPDX-License-Identifier: Apache-2.0
//
// Plain-text dump of a ConicProblem for debugging and for replaying a
// subproblem outside the algorithm loop:
//
//   conic 1
//   dims <n> <p> <m>
//   cones <orthant> <nsoc> <q1> <q2> ...
//   c <n values>
//   b <p values>
//   h <m values>
//   A <nnz>      followed by nnz lines "row col value"
//   G <nnz>      likewise
//
// Values are written with 17 significant digits so a round trip is exact.
#pragma once

#include "cranmc/conic/problem.hpp"

#include <iosfwd>

namespace cranmc::conic {

void write_problem(std::ostream& out, const ConicProblem& problem);
/// Throws std::runtime_error on malformed input.
ConicProblem read_problem(std::istream& in);

}  // namespace cranmc::conic
