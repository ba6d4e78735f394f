// SPDX-License-Identifier: Apache-2.0
//
// Primal-dual interior-point method on the homogeneous self-dual embedding
// with Nesterov-Todd scaling and Mehrotra predictor-corrector steps. The
// embedding certifies infeasibility and unboundedness instead of timing out.
//
// Dense linear algebra throughout: the beamforming subproblems have at most
// a few hundred variables.
#pragma once

#include "cranmc/conic/problem.hpp"

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace cranmc::conic {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations };

std::string_view to_string(SolveStatus s);

struct SolverOptions {
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iterations = 100;
    /// Equality rows whose pivot falls below this (relative) are dropped.
    double presolve_tol = 1e-10;
};

struct IterationInfo {
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double step = 0.0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIterations;
    Eigen::VectorXd x, y, z, s;
    double primal_objective = 0.0;  // c'x, original units
    double dual_objective = 0.0;    // -b'y - h'z, original units
    /// Complementarity s'z of the normalized problem (unit-infinity-norm c, scaled cone rows).
    double gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    std::vector<IterationInfo> trace;
    std::string diagnostics;

    bool optimal() const { return status == SolveStatus::Optimal; }
    /// Stalled with every measure within `tol`; usable but not certified.
    bool near_optimal(double tol = 1e-6) const {
        return status == SolveStatus::MaxIterations && primal_residual <= tol && dual_residual <= tol &&
               gap <= tol;
    }
};

SolveReport solve(const ConicProblem& problem, const SolverOptions& options = {});

}  // namespace cranmc::conic
