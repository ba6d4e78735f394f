// SPDX-License-Identifier: Apache-2.0
//
// Reference solutions that share no code with the library's solvers.
#pragma once

#include "cranmc/conic/problem.hpp"

#include <Eigen/Core>

#include <random>

namespace oracle {

// Random bounded, strictly feasible SOCP in n variables: a box |x_i| <= 3 in
// the orthant plus one to three second-order cones through a known interior
// point.
cranmc::conic::ConicProblem random_socp(std::mt19937_64& rng, int n);

struct SplittingResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    double primal_residual = 0.0;  // ||G x + s - h|| at exit, s in K
    int iterations = 0;
};

// Over-relaxed ADMM on min c'x + I_K(h - Gx) (equalities as the zero cone),
// alternating a least-squares x step with a Euclidean projection onto K.
SplittingResult splitting_solve(const cranmc::conic::ConicProblem& p, int max_iterations = 400000,
                                double tol = 1e-10);

// Projection onto {(t, u) : t >= ||u||}.
Eigen::VectorXd project_soc(const Eigen::VectorXd& v);

// One user, one single-antenna RRH: every quantity is scalar, so the joint
// problem reduces to a search over the rate r.
struct SingleLink {
    double gain = 1e-8;       // |h|^2
    double noise = 1e-6;      // sigma^2, W
    double bandwidth = 1e7;   // Hz
    double power_limit = 1.0;
    double fronthaul = 1e7;
    double cycles = 1500.0;
    double bits = 1000.0;
    double deadline = 0.1;
    double capacity_limit = 1e6;
    double kappa = 1e-11;
    double nu = 3.0;
    double eta = 10.0;
};

// Clone energy at f = F / (T - D/r) plus eta * p(r) * D / r with the power
// that inverts the Shannon rate. +inf outside the feasible rates.
double single_link_energy(const SingleLink& s, double rate);
double single_link_max_rate(const SingleLink& s);
double single_link_min_rate(const SingleLink& s);

struct RateSearch {
    double rate = 0.0;
    double energy = 0.0;
};

// Dense grid over [R_min, R_max] followed by golden-section refinement
// around the best grid point.
RateSearch single_link_search(const SingleLink& s, int grid = 200000);

}  // namespace oracle
