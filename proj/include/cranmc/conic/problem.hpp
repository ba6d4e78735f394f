// SPDX-License-Identifier: Apache-2.0
//
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,  s in K
//
// K is an ordered product: one nonnegative orthant block of dimension
// `orthant` followed by second-order cones {(s0, s1) : s0 >= ||s1||}.
#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace cranmc::conic {

struct ConeSpec {
    int orthant = 0;
    std::vector<int> soc;

    int dim() const;
    /// Barrier degree: one per orthant coordinate, one per SOC.
    int degree() const;
    bool operator==(const ConeSpec&) const = default;
};

struct ConicProblem {
    Eigen::VectorXd c;
    Eigen::MatrixXd A;  // p x n, may have zero rows
    Eigen::VectorXd b;
    Eigen::MatrixXd G;  // m x n
    Eigen::VectorXd h;
    ConeSpec cones;
    /// Optional labels for the columns of x (may be empty).
    std::vector<std::string> names;

    int num_vars() const { return static_cast<int>(c.size()); }
    /// Throws std::invalid_argument on inconsistent dimensions.
    void check() const;
};

}  // namespace cranmc::conic
