// SPDX-License-Identifier: Apache-2.0
#include "cranmc/wmmse.hpp"

#include "cranmc/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cranmc {

std::vector<std::complex<double>> mmse_receiver(const ChannelState& ch, const BeamformerSet& bf,
                                                const Clusters* serving) {
    const Eigen::MatrixXcd a = cross_gains(ch, bf, serving);
    std::vector<std::complex<double>> u(static_cast<std::size_t>(ch.num_ue));
    for (int i = 0; i < ch.num_ue; ++i) {
        u[static_cast<std::size_t>(i)] = a(i, i) / (a.row(i).squaredNorm() + ch.noise_power[i]);
    }
    return u;
}

namespace {

double mse_from_row(const Eigen::MatrixXcd& a, int i, std::complex<double> u, double noise) {
    return std::norm(u) * (a.row(i).squaredNorm() + noise) - 2.0 * std::real(std::conj(u) * a(i, i)) + 1.0;
}

}  // namespace

double mse(int ue, std::complex<double> u, const ChannelState& ch, const BeamformerSet& bf, const Clusters* serving) {
    const Eigen::MatrixXcd a = cross_gains(ch, bf, serving);
    return mse_from_row(a, ue, u, ch.noise_power[ue]);
}

std::vector<double> mse_all(const std::vector<std::complex<double>>& u, const ChannelState& ch,
                            const BeamformerSet& bf, const Clusters* serving) {
    const Eigen::MatrixXcd a = cross_gains(ch, bf, serving);
    std::vector<double> e(static_cast<std::size_t>(ch.num_ue));
    for (int i = 0; i < ch.num_ue; ++i) {
        e[static_cast<std::size_t>(i)] = mse_from_row(a, i, u[static_cast<std::size_t>(i)], ch.noise_power[i]);
    }
    return e;
}

double cloud_energy_at_rate(double r, const Task& t, const SystemConfig& cfg, int ue) {
    const auto i = static_cast<std::size_t>(ue);
    const double left = (t.result_bits > 0.0) ? t.deadline - t.result_bits / r : t.deadline;
    if (!(left > 0.0)) return std::numeric_limits<double>::infinity();
    return cfg.switched_capacitance[i] * std::pow(t.cpu_cycles / left, cfg.cloud_exponent[i] - 1.0) * t.cpu_cycles;
}

double tau(double e, const Task& t, const SystemConfig& cfg, int ue) {
    return cloud_energy_at_rate(-cfg.bandwidth[static_cast<std::size_t>(ue)] * std::log2(e), t, cfg, ue);
}

double mse_ceiling(const Task& t, const SystemConfig& cfg, int ue) {
    const auto i = static_cast<std::size_t>(ue);
    if (t.result_bits <= 0.0) return 1.0;
    const double rmin = min_rate_requirement(t.result_bits, t.deadline, t.cpu_cycles, cfg.clone_capacity_limit[i], ue);
    return std::exp2(-rmin / cfg.bandwidth[i]);
}

double mse_weight(double e, const Task& t, const SystemConfig& cfg, int ue) {
    if (!(e > 0.0 && e < 1.0)) throw DomainError("mse_weight: e must lie in (0, 1)");
    const auto i = static_cast<std::size_t>(ue);
    const double nu = cfg.cloud_exponent[i];
    if (t.result_bits <= 0.0 || nu == 1.0 || cfg.switched_capacitance[i] == 0.0) return 0.0;
    const double ee = std::min(e, mse_ceiling(t, cfg, ue));
    const double b = cfg.bandwidth[i];
    const double r = -b * std::log2(ee);
    const double left = t.deadline - t.result_bits / r;
    return (nu - 1.0) * cfg.switched_capacitance[i] * std::pow(t.cpu_cycles, nu) * t.result_bits * b /
           (std::pow(left, nu) * r * r * ee * std::numbers::ln2);
}

}  // namespace cranmc
