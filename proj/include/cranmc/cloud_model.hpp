// SPDX-License-Identifier: Apache-2.0
//
// Mobile-clone execution model: a clone running at f cycles/s finishes F
// cycles in F/f seconds and burns kappa * f^(nu-1) * F joules.
#pragma once

#include "cranmc/scenario.hpp"

#include <vector>

namespace cranmc {

struct CloudAllocation {
    std::vector<double> clone_capacity;  // f_i, cycles/s
    std::vector<double> exec_time;       // s
    std::vector<double> exec_energy;     // J

    double total_energy() const;
};

double clone_exec_time(double cpu_cycles, double capacity);
double clone_energy(double cpu_cycles, double capacity, double kappa, double nu);

/// Energy-optimal clone speeds when user i must finish within deadlines[i]:
/// the deadline is tight, f = F/T. Throws InfeasibleError(Cloud, i) when that
/// speed exceeds the clone's capacity limit.
CloudAllocation solve_p1(const std::vector<Task>& tasks, const std::vector<double>& deadlines,
                         const SystemConfig& cfg);

}  // namespace cranmc
