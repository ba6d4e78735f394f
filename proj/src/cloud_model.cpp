// SPDX-License-Identifier: Apache-2.0
#include "cranmc/cloud_model.hpp"

#include "cranmc/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace cranmc {

double CloudAllocation::total_energy() const {
    return std::accumulate(exec_energy.begin(), exec_energy.end(), 0.0);
}

double clone_exec_time(double cpu_cycles, double capacity) {
    if (!(capacity > 0.0)) throw DomainError("clone_exec_time: capacity must be > 0");
    if (!(cpu_cycles > 0.0)) throw DomainError("clone_exec_time: cpu_cycles must be > 0");
    return cpu_cycles / capacity;
}

double clone_energy(double cpu_cycles, double capacity, double kappa, double nu) {
    if (!(nu >= 1.0)) throw DomainError("clone_energy: nu must be >= 1");
    if (!(capacity > 0.0)) throw DomainError("clone_energy: capacity must be > 0");
    if (!(cpu_cycles > 0.0)) throw DomainError("clone_energy: cpu_cycles must be > 0");
    if (!(kappa >= 0.0)) throw DomainError("clone_energy: kappa must be >= 0");
    return kappa * std::pow(capacity, nu - 1.0) * cpu_cycles;
}

CloudAllocation solve_p1(const std::vector<Task>& tasks, const std::vector<double>& deadlines,
                         const SystemConfig& cfg) {
    if (deadlines.size() != tasks.size()) throw DomainError("solve_p1: one deadline per task expected");
    CloudAllocation out;
    const std::size_t n = tasks.size();
    out.clone_capacity.resize(n);
    out.exec_time.resize(n);
    out.exec_energy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = deadlines[i];
        if (!(t > 0.0)) throw DomainError("solve_p1: deadline must be > 0");
        const double f = tasks[i].cpu_cycles / t;
        if (f > cfg.clone_capacity_limit[i]) {
            std::ostringstream os;
            os << "UE " << i << ": clone needs " << f << " cycles/s, limit is " << cfg.clone_capacity_limit[i];
            throw InfeasibleError(InfeasibleSide::Cloud, static_cast<int>(i), os.str());
        }
        out.clone_capacity[i] = f;
        out.exec_time[i] = t;
        out.exec_energy[i] = clone_energy(tasks[i].cpu_cycles, f, cfg.switched_capacitance[i], cfg.cloud_exponent[i]);
    }
    return out;
}

}  // namespace cranmc
