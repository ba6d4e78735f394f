// SPDX-License-Identifier: Apache-2.0
//
// Jordan algebra of the orthant x SOC product and Nesterov-Todd scaling.
#pragma once

#include "cranmc/conic/problem.hpp"

#include <Eigen/Core>

#include <vector>

namespace cranmc::conic {

/// Identity element e.
Eigen::VectorXd cone_identity(const ConeSpec& k);
/// Smallest "eigenvalue" of x: min x_i over the orthant, x0 - ||x1|| per SOC.
double min_eigenvalue(const ConeSpec& k, const Eigen::VectorXd& x);
Eigen::VectorXd jordan_product(const ConeSpec& k, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// u with lambda o u = d; lambda must be interior.
Eigen::VectorXd jordan_divide(const ConeSpec& k, const Eigen::VectorXd& lambda, const Eigen::VectorXd& d);
/// Largest a in [0, inf) with x + a d in K (inf when the ray never leaves K).
double max_step(const ConeSpec& k, const Eigen::VectorXd& x, const Eigen::VectorXd& d);

/// Nesterov-Todd scaling for an interior pair (s, z): W z = W^{-1} s = lambda.
/// Every block of W is symmetric, so W' = W.
class NtScaling {
public:
    NtScaling(const ConeSpec& k, const Eigen::VectorXd& s, const Eigen::VectorXd& z);

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;          // W x
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& x) const;  // W^{-1} x
    /// W^{-1} M column by column.
    Eigen::MatrixXd apply_inverse(const Eigen::MatrixXd& m) const;
    const Eigen::VectorXd& lambda() const { return lambda_; }

private:
    const ConeSpec* k_;
    Eigen::VectorXd d_;  // orthant: sqrt(s/z)
    struct SocBlock {
        int offset = 0;
        int dim = 0;
        double beta = 1.0;
        Eigen::VectorXd v;  // W = beta (2 v v' - J)
    };
    std::vector<SocBlock> blocks_;
    Eigen::VectorXd lambda_;
};

}  // namespace cranmc::conic
