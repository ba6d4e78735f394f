// SPDX-License-Identifier: Apache-2.0
#include "cranmc/ran_model.hpp"

#include "cranmc/errors.hpp"

#include <cmath>
#include <sstream>

namespace cranmc {

BeamformerSet BeamformerSet::zeros(int num_ue, int num_rrh, int antennas) {
    BeamformerSet b;
    b.num_ue = num_ue;
    b.num_rrh = num_rrh;
    b.antennas = antennas;
    b.v = Eigen::MatrixXcd::Zero(antennas, static_cast<Eigen::Index>(num_ue) * num_rrh);
    return b;
}

BeamformerSet BeamformerSet::zeros_like(const ChannelState& ch) { return zeros(ch.num_ue, ch.num_rrh, ch.antennas); }

Eigen::MatrixXd BeamformerSet::block_power() const {
    Eigen::MatrixXd p(num_ue, num_rrh);
    for (int i = 0; i < num_ue; ++i)
        for (int j = 0; j < num_rrh; ++j) p(i, j) = at(i, j).squaredNorm();
    return p;
}

Eigen::MatrixXcd cross_gains(const ChannelState& ch, const BeamformerSet& bf, const Clusters* serving) {
    if (bf.num_ue != ch.num_ue || bf.num_rrh != ch.num_rrh || bf.antennas != ch.antennas) {
        throw DomainError("cross_gains: beamformer dimensions do not match the channel");
    }
    const int n = ch.num_ue;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        auto add = [&](int j) {
            for (int k = 0; k < n; ++k) a(i, k) += ch.h(i, j).dot(bf.at(k, j));  // h^H v
        };
        if (serving) {
            for (int j : (*serving)[static_cast<std::size_t>(i)]) add(j);
        } else {
            for (int j = 0; j < ch.num_rrh; ++j) add(j);
        }
    }
    return a;
}

double sinr(int ue, const ChannelState& ch, const BeamformerSet& bf, const Clusters* serving) {
    const Eigen::MatrixXcd a = cross_gains(ch, bf, serving);
    const double signal = std::norm(a(ue, ue));
    const double interference = a.row(ue).squaredNorm() - signal;
    return signal / (interference + ch.noise_power[ue]);
}

double rate_from_sinr(double s, double bandwidth) {
    if (!(bandwidth > 0.0)) throw DomainError("rate: bandwidth must be > 0");
    return bandwidth * std::log2(1.0 + s);
}

double rate(int ue, const ChannelState& ch, const BeamformerSet& bf, double bandwidth, const Clusters* serving) {
    return rate_from_sinr(sinr(ue, ch, bf, serving), bandwidth);
}

std::vector<double> rates(const ChannelState& ch, const BeamformerSet& bf, const SystemConfig& cfg,
                          const Clusters* serving) {
    const Eigen::MatrixXcd a = cross_gains(ch, bf, serving);
    std::vector<double> r(static_cast<std::size_t>(ch.num_ue));
    for (int i = 0; i < ch.num_ue; ++i) {
        const double signal = std::norm(a(i, i));
        const double s = signal / (a.row(i).squaredNorm() - signal + ch.noise_power[i]);
        r[static_cast<std::size_t>(i)] = rate_from_sinr(s, cfg.bandwidth[static_cast<std::size_t>(i)]);
    }
    return r;
}

TransmitCost transmit_cost(double bits, double r, double power) {
    if (bits == 0.0) return {};
    if (!(r > 0.0)) throw DomainError("transmit_cost: rate must be > 0 when there is payload");
    return {bits / r, power * bits / r};
}

double rrh_power(int rrh, const BeamformerSet& bf) {
    double p = 0.0;
    for (int i = 0; i < bf.num_ue; ++i) p += bf.at(i, rrh).squaredNorm();
    return p;
}

double ue_power(int ue, const BeamformerSet& bf) {
    double p = 0.0;
    for (int j = 0; j < bf.num_rrh; ++j) p += bf.at(ue, j).squaredNorm();
    return p;
}

std::vector<double> ue_powers(const BeamformerSet& bf) {
    std::vector<double> p(static_cast<std::size_t>(bf.num_ue));
    for (int i = 0; i < bf.num_ue; ++i) p[static_cast<std::size_t>(i)] = ue_power(i, bf);
    return p;
}

FronthaulWeights fronthaul_weights(const BeamformerSet& bf, double eps) {
    if (!(eps > 0.0)) throw DomainError("fronthaul_weights: eps must be > 0");
    FronthaulWeights w;
    w.rho = (bf.block_power().array() + eps).inverse().matrix();
    return w;
}

double fronthaul_load_l0(int rrh, const BeamformerSet& bf, const std::vector<double>& r, double zero_threshold) {
    double load = 0.0;
    for (int i = 0; i < bf.num_ue; ++i) {
        if (bf.at(i, rrh).squaredNorm() > zero_threshold) load += r[static_cast<std::size_t>(i)];
    }
    return load;
}

double fronthaul_load_weighted(int rrh, const BeamformerSet& bf, const std::vector<double>& r,
                               const FronthaulWeights& w) {
    if (!w.active()) return 0.0;
    double load = 0.0;
    for (int i = 0; i < bf.num_ue; ++i) {
        load += w.rho(i, rrh) * bf.at(i, rrh).squaredNorm() * r[static_cast<std::size_t>(i)];
    }
    return load;
}

double min_rate_requirement(double bits, double transmit_budget) {
    if (!(transmit_budget > 0.0)) throw DomainError("min_rate_requirement: budget must be > 0");
    return bits / transmit_budget;
}

double min_rate_requirement(double bits, double deadline, double cpu_cycles, double capacity_limit, int ue) {
    const double slack = deadline - cpu_cycles / capacity_limit;
    if (!(slack > 0.0)) {
        std::ostringstream os;
        os << "UE " << ue << ": clone at full speed needs " << cpu_cycles / capacity_limit << " s of a " << deadline
           << " s deadline";
        throw InfeasibleError(InfeasibleSide::Cloud, ue, os.str());
    }
    return bits / slack;
}

EnergyBreakdown total_energy(const SystemConfig& cfg, const std::vector<Task>& tasks,
                             const std::vector<double>& cloud_energy, const std::vector<double>& powers,
                             const std::vector<double>& r) {
    const std::size_t n = tasks.size();
    EnergyBreakdown e;
    e.cloud = cloud_energy;
    e.transmit.resize(n);
    e.total.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (tasks[i].result_bits > 0.0 && !(r[i] > 0.0)) {
            throw DomainError("total_energy: UE " + std::to_string(i) + " has payload but zero rate");
        }
        e.transmit[i] = transmit_cost(tasks[i].result_bits, r[i], powers[i]).energy;
        e.total[i] = e.cloud[i] + cfg.tradeoff[i] * e.transmit[i];
        e.cloud_total += e.cloud[i];
        e.transmit_total += cfg.tradeoff[i] * e.transmit[i];
        e.grand_total += e.total[i];
    }
    return e;
}

EnergyBreakdown total_energy(const SystemConfig& cfg, const std::vector<Task>& tasks, const CloudAllocation& cloud,
                             const BeamformerSet& bf, const std::vector<double>& r) {
    return total_energy(cfg, tasks, cloud.exec_energy, ue_powers(bf), r);
}

}  // namespace cranmc
