// SPDX-License-Identifier: Apache-2.0
//
// Separate RAN power minimization with reweighted-l1 fronthaul (Algorithm 1),
// joint cloud/RAN energy minimization by WMMSE block coordinate descent
// (Algorithm 2), and the fixed-split separate baseline.
#pragma once

#include "cranmc/cloud_model.hpp"
#include "cranmc/conic/solver.hpp"
#include "cranmc/ran_model.hpp"
#include "cranmc/scenario.hpp"

#include <complex>
#include <string>
#include <vector>

namespace cranmc {

struct AlgorithmOptions {
    double tolerance = 1e-4;  // relative change of the tracked objective
    int max_iterations = 30;
    /// j serves i iff ||v_ij||^2 > cluster_threshold * P_j.
    double cluster_threshold = 1e-6;
    double elimination_power = 1e-9;
    /// Backtracking on the transmit step of the joint loop. Off gives the
    /// undamped block update.
    bool damping = true;
    conic::SolverOptions solver;
};

namespace status {
inline constexpr const char* kOptimal = "optimal";
inline constexpr const char* kInfeasibleCloud = "infeasible-cloud";
inline constexpr const char* kInfeasibleRan = "infeasible-ran";
inline constexpr const char* kMaxIterations = "max_iterations";
inline constexpr const char* kSolverFailure = "solver-failure";
}  // namespace status

struct RanSolution {
    BeamformerSet beamformers;
    std::vector<double> rates;
    Clusters clusters;
    std::vector<double> powers;  // p_i over the serving set
    std::vector<double> trace;   // tracked objective per outer iteration
    std::string status = status::kOptimal;
    int iterations = 0;
    int infeasible_ue = -1;
    std::string diagnostics;

    /// A usable allocation was produced (converged or iteration cap reached).
    bool has_solution() const { return status == status::kOptimal || status == status::kMaxIterations; }
};

struct MseState {
    std::vector<std::complex<double>> receivers;
    std::vector<double> mse;
    std::vector<double> weights;
};

/// Surrogate sum_i phi_i e_i + c_i(phi_i) + w_i p_i around one block sweep,
/// all with the same fronthaul weights and power weights w_i.
struct SurrogateStep {
    int iteration = 0;
    double before = 0.0;         // (v_n, u_{n-1}, phi_{n-1})
    double after_receiver = 0.0;  // (v_n, u_n, phi_{n-1})
    double after_weight = 0.0;    // (v_n, u_n, phi_n)
    double after_transmit = 0.0;  // (v_{n+1}, u_n, phi_n)
    double step_size = 1.0;       // damping factor applied to the transmit step
    /// v_n violated this iteration's constraint set (new fronthaul weights
    /// or pinned blocks), so the transmit step starts a new fixed-rho phase.
    bool phase_change = false;
};

struct JointSolution : RanSolution {
    CloudAllocation cloud;
    EnergyBreakdown energy;
    std::vector<double> energy_trace;
    std::vector<SurrogateStep> surrogate;
    MseState last_mse;
};

struct SeparateSolution {
    CloudAllocation cloud;
    RanSolution ran;
    EnergyBreakdown energy;
};

/// Serving sets and the beamformers with sub-threshold blocks zeroed.
std::pair<Clusters, BeamformerSet> extract_rrh_clusters(const BeamformerSet& bf, const std::vector<double>& power_limits,
                                                        double threshold);

/// v_ij = sqrt(P_j / (2N)) h_ij / ||h_ij|| for users with payload, zero otherwise.
BeamformerSet initial_beamformers(const ChannelState& ch, const SystemConfig& cfg, const std::vector<Task>& tasks);

RanSolution algorithm1_separate_ran(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                                    const std::vector<double>& transmit_budgets, const AlgorithmOptions& opt = {});

/// Throws InfeasibleError(Cloud, i) when T_i <= F_i / f_max_i.
JointSolution algorithm2_joint(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                               const AlgorithmOptions& opt = {});

/// Cloud deadline (1 - alpha) T, transmit budget alpha T. Throws
/// InfeasibleError naming the side that fails.
SeparateSolution separate_baseline(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                                   double alpha, const AlgorithmOptions& opt = {});

/// Worst violations of a returned allocation, each as (value - limit), <= 0 when satisfied.
struct ConstraintReplay {
    double rrh_power = 0.0;       // W
    double rate_floor = 0.0;      // relative: (floor - r) / floor
    double fronthaul = 0.0;       // relative to C_max, l0 load at the extracted clusters
    double deadline = 0.0;        // s
    double clone_capacity = 0.0;  // relative to f_max
    bool ok(double tol = 1e-6) const {
        return rrh_power <= tol && rate_floor <= tol && fronthaul <= tol && deadline <= tol && clone_capacity <= tol;
    }
};

/// `rate_floors` are the floors the allocation was built for; `clone_capacity`
/// and `cloud_deadlines` empty when not applicable.
ConstraintReplay replay_constraints(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                                    const BeamformerSet& bf, const std::vector<double>& rate_floors,
                                    const std::vector<double>& clone_capacity, const AlgorithmOptions& opt = {});

}  // namespace cranmc
