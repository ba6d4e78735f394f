// SPDX-License-Identifier: Apache-2.0
//
// Complex-to-real embedding. A program over complex K-vectors v_b is
// described with three kinds of terms -- Hermitian quadratic forms (as sums
// of |affine|^2), real parts of linear forms, and norms -- and lowered to a
// real ConicProblem. Each v_b becomes 2K reals, real parts over imaginary
// parts:
//
//   x[2K b + k] = Re v_b[k],   x[2K b + K + k] = Im v_b[k]
//
// so Re(g^H v) = Re(g)'Re(v) + Im(g)'Im(v) and ||v|| is the norm of its
// 2K-vector. Blocks can be pinned to zero, which removes their columns.
#pragma once

#include "cranmc/conic/problem.hpp"
#include "cranmc/conic/solver.hpp"

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace cranmc::conic {

/// coef^H v_block.
struct ComplexTerm {
    int block = 0;
    Eigen::VectorXcd coef;
};

struct ComplexAffine {
    std::vector<ComplexTerm> terms;
    std::complex<double> constant{0.0, 0.0};
};

/// || entries || <= Re(bound).
struct NormConstraint {
    std::vector<ComplexAffine> entries;
    ComplexAffine bound;
    int tag = 0;  // caller-defined kind, reported back by count
};

struct ComplexProgram {
    int num_blocks = 0;
    int block_dim = 0;
    std::vector<bool> pinned_zero;  // empty or one per block

    /// Objective: sum_r |quadratic[r]|^2 + Re(linear) + constant.
    std::vector<ComplexAffine> quadratic;
    ComplexAffine linear;
    double constant = 0.0;

    std::vector<NormConstraint> constraints;
};

struct EmbeddedProblem {
    ConicProblem problem;
    int num_blocks = 0;
    int block_dim = 0;
    /// Column of real coordinate r = 2K b + (0..2K-1), or -1 when pinned.
    std::vector<int> column;
    /// Number of columns carrying beamformer coordinates (the epigraph variable excluded).
    int num_block_columns = 0;
    int epigraph_column = -1;
    /// objective = problem.c'x / objective_scale + objective_constant
    double objective_scale = 1.0;
    double objective_constant = 0.0;
    /// Constraint counts per caller tag.
    std::vector<int> tag_counts;

    /// Complex blocks from a real point (pinned blocks are zero), K x num_blocks.
    Eigen::MatrixXcd extract(const Eigen::VectorXd& x) const;
    /// Real point for complex blocks (pinned blocks dropped); epigraph set to the quadratic value if present.
    Eigen::VectorXd embed_point(const Eigen::MatrixXcd& v) const;
    double objective(const SolveReport& r) const { return r.primal_objective / objective_scale + objective_constant; }
};

/// Throws std::invalid_argument if a term references a bad block or has the wrong length.
EmbeddedProblem embed_complex(const ComplexProgram& program);

/// Evaluate Re/Im of an affine form at complex blocks (K x num_blocks), for replay.
std::complex<double> evaluate(const ComplexAffine& a, const Eigen::MatrixXcd& v);

}  // namespace cranmc::conic
