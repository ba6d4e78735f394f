// SPDX-License-Identifier: Apache-2.0
//
// Beamforming subproblems as SOCPs over the embedded v_ij (block i*L + j).
//
// Channels are normalized by each user's noise, h~_ij = h_ij / sigma_i, so
// every cross gain a~_ik = sum_j h~_ij^H v_kj is dimensionless.
//
// Rate floor r_i >= R:  with c = 1 - 2^(-R/B),
//     sqrt(c) || (a~_i1, ..., a~_iN, 1) || <= Re a~_ii,
// the phase-aligned form of SINR_i >= 2^(R/B) - 1 (any feasible v can be
// rotated per user into it without changing SINR or power).
// Per-RRH power:  || v_.j || <= sqrt(P_j).
// Fronthaul:      sum_i rho_ij r_i ||v_ij||^2 <= C_j with r frozen, as
//                 || (sqrt(rho_ij r_i / C_j) v_ij)_i || <= 1.
#pragma once

#include "cranmc/conic/embedding.hpp"
#include "cranmc/ran_model.hpp"
#include "cranmc/scenario.hpp"

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace cranmc::conic {

enum ConstraintTag { kPowerCone = 0, kRateCone = 1, kFronthaulCone = 2 };

struct BeamformingInputs {
    const ChannelState* channels = nullptr;
    const SystemConfig* config = nullptr;
    /// R_i in bit/s; <= 0 means no floor for that user.
    std::vector<double> rate_floors;
    /// Inactive (empty) weights drop the fronthaul cones.
    FronthaulWeights weights;
    std::vector<double> frozen_rates;
    /// N x L; false pins v_ij to zero. Empty = every block free.
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> support;
    /// w_i multiplying ||v_i||^2 in the objective.
    std::vector<double> power_weights;
    /// Blocks whose fronthaul term alone caps ||v_ij||^2 below this many
    /// watts are pinned to zero instead of entering the cone with a huge
    /// coefficient.
    double elimination_power = 1e-9;
};

struct BeamformingProblem {
    EmbeddedProblem embedded;
    int num_ue = 0;
    int num_rrh = 0;
    int antennas = 0;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> pinned;  // N x L

    BeamformerSet beamformers(const Eigen::VectorXd& x) const;
    int num_power_cones() const { return count(kPowerCone); }
    int num_rate_cones() const { return count(kRateCone); }
    int num_fronthaul_cones() const { return count(kFronthaulCone); }

private:
    int count(int tag) const {
        return tag < static_cast<int>(embedded.tag_counts.size()) ? embedded.tag_counts[static_cast<std::size_t>(tag)] : 0;
    }
};

/// min sum_i w_i ||v_i||^2 subject to rate floors, per-RRH power and fronthaul.
BeamformingProblem build_power_min_socp(const BeamformingInputs& in);

/// min sum_i phi_i e_i(v; u_i) + w_i ||v_i||^2 with
/// e_i = |u_i|^2 (sum_k |a_ik|^2 + sigma_i^2) - 2 Re(u_i^* a_ii) + 1, same constraints.
/// `receivers` are in physical units (as returned by mmse_receiver).
BeamformingProblem build_wmmse_step_socp(const BeamformingInputs& in,
                                         const std::vector<std::complex<double>>& receivers,
                                         const std::vector<double>& mse_weights);

}  // namespace cranmc::conic
