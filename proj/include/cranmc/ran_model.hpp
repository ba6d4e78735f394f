// SPDX-License-Identifier: Apache-2.0
//
// Downlink accounting: SINR, Shannon rate, transmit time/energy, per-RRH
// power, fronthaul load and the weighted total energy.
//
// Interference at user i is seen through i's own channels: the cross gain
// a_ik = sum_j h_ij^H v_kj enters both the signal (k = i) and the
// interference (k != i) terms.
#pragma once

#include "cranmc/cloud_model.hpp"
#include "cranmc/scenario.hpp"

#include <Eigen/Core>

#include <vector>

namespace cranmc {

struct BeamformerSet {
    int num_ue = 0;
    int num_rrh = 0;
    int antennas = 0;
    /// Column i*num_rrh + j holds v_ij (same layout as ChannelState::gains).
    Eigen::MatrixXcd v;

    static BeamformerSet zeros(int num_ue, int num_rrh, int antennas);
    static BeamformerSet zeros_like(const ChannelState& ch);

    auto at(int ue, int rrh) const { return v.col(ue * num_rrh + rrh); }
    auto at(int ue, int rrh) { return v.col(ue * num_rrh + rrh); }

    /// ||v_ij||^2 as an N x L matrix.
    Eigen::MatrixXd block_power() const;
    bool operator==(const BeamformerSet& o) const { return v == o.v; }
};

/// Serving RRH indices per user.
using Clusters = std::vector<std::vector<int>>;

/// rho_ij per (user, RRH) as an N x L matrix. Empty matrix = fronthaul term inactive.
struct FronthaulWeights {
    Eigen::MatrixXd rho;
    bool active() const { return rho.size() > 0; }
};

struct EnergyBreakdown {
    std::vector<double> cloud;     // E_i^C
    std::vector<double> transmit;  // E_i^Tr (unweighted)
    std::vector<double> total;     // E_i^C + eta_i E_i^Tr
    double cloud_total = 0.0;
    double transmit_total = 0.0;   // sum of eta_i E_i^Tr
    double grand_total = 0.0;
};

struct TransmitCost {
    double time = 0.0;    // s
    double energy = 0.0;  // J
};

/// N x N matrix of a_ik. `serving`, when given, restricts the RRH sum to
/// serving[i] for row i.
Eigen::MatrixXcd cross_gains(const ChannelState& ch, const BeamformerSet& bf, const Clusters* serving = nullptr);

double sinr(int ue, const ChannelState& ch, const BeamformerSet& bf, const Clusters* serving = nullptr);
double rate_from_sinr(double sinr, double bandwidth);
double rate(int ue, const ChannelState& ch, const BeamformerSet& bf, double bandwidth,
            const Clusters* serving = nullptr);
std::vector<double> rates(const ChannelState& ch, const BeamformerSet& bf, const SystemConfig& cfg,
                          const Clusters* serving = nullptr);

TransmitCost transmit_cost(double bits, double rate, double power);

double rrh_power(int rrh, const BeamformerSet& bf);
/// p_i = sum_j ||v_ij||^2.
double ue_power(int ue, const BeamformerSet& bf);
std::vector<double> ue_powers(const BeamformerSet& bf);

/// rho_ij = 1 / (||v_ij||^2 + eps).
FronthaulWeights fronthaul_weights(const BeamformerSet& bf, double eps);

/// Sum of r_i over users whose ||v_ij||^2 exceeds `zero_threshold`.
double fronthaul_load_l0(int rrh, const BeamformerSet& bf, const std::vector<double>& rates, double zero_threshold);
/// Sum of rho_ij ||v_ij||^2 r_i.
double fronthaul_load_weighted(int rrh, const BeamformerSet& bf, const std::vector<double>& rates,
                               const FronthaulWeights& w);

/// D / T_budget.
double min_rate_requirement(double bits, double transmit_budget);
/// D / (T_max - F/f_max); throws InfeasibleError(Cloud, ue) when the clone
/// alone uses up the deadline.
double min_rate_requirement(double bits, double deadline, double cpu_cycles, double capacity_limit, int ue = -1);

/// E_i = E_i^C + eta_i p_i D_i / r_i. Throws DomainError for r_i = 0 with D_i > 0.
EnergyBreakdown total_energy(const SystemConfig& cfg, const std::vector<Task>& tasks,
                             const std::vector<double>& cloud_energy, const std::vector<double>& powers,
                             const std::vector<double>& rates);
EnergyBreakdown total_energy(const SystemConfig& cfg, const std::vector<Task>& tasks, const CloudAllocation& cloud,
                             const BeamformerSet& bf, const std::vector<double>& rates);

}  // namespace cranmc
