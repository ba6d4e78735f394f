// SPDX-License-Identifier: Apache-2.0
//
// WMMSE kernel. With the MMSE receiver u_i, e_i = 1 / (1 + SINR_i), so the
// rate is r_i = B log2(1/e_i) and the cloud energy left after transmission,
// gamma_i(r) = kappa (F / (T - D/r))^(nu-1) F, becomes a function of the MSE:
// tau_i(e) = gamma_i(-B log2 e). The MSE weight is phi_i = tau_i'(e_i).
#pragma once

#include "cranmc/ran_model.hpp"
#include "cranmc/scenario.hpp"

#include <complex>
#include <vector>

namespace cranmc {

/// u_i = a_ii / (sum_k |a_ik|^2 + sigma_i^2).
std::vector<std::complex<double>> mmse_receiver(const ChannelState& ch, const BeamformerSet& bf,
                                                const Clusters* serving = nullptr);

/// e_i = |u|^2 (sum_k |a_ik|^2 + sigma_i^2) - 2 Re(u^* a_ii) + 1.
double mse(int ue, std::complex<double> u, const ChannelState& ch, const BeamformerSet& bf,
           const Clusters* serving = nullptr);
std::vector<double> mse_all(const std::vector<std::complex<double>>& u, const ChannelState& ch,
                            const BeamformerSet& bf, const Clusters* serving = nullptr);

/// gamma_i(r): clone energy when transmission at rate r leaves T - D/r for execution.
/// +inf when r <= D/T.
double cloud_energy_at_rate(double rate, const Task& task, const SystemConfig& cfg, int ue);
/// tau_i(e) = gamma_i(-B log2 e).
double tau(double e, const Task& task, const SystemConfig& cfg, int ue);

/// Largest MSE compatible with the user's rate floor: 2^(-R_min/B).
double mse_ceiling(const Task& task, const SystemConfig& cfg, int ue);

/// phi = d tau / d e at min(e, mse_ceiling), in closed form:
///   (nu-1) kappa F^nu D B / ((T - D/r)^nu r^2 e ln 2),  r = -B log2 e.
/// Throws DomainError for e outside (0, 1).
double mse_weight(double e, const Task& task, const SystemConfig& cfg, int ue);

}  // namespace cranmc
