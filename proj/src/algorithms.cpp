// SPDX-License-Identifier: Apache-2.0
#include "cranmc/algorithms.hpp"

#include "cranmc/conic/builders.hpp"
#include "cranmc/errors.hpp"
#include "cranmc/wmmse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cranmc {

namespace {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

Mask payload_support(const std::vector<Task>& tasks, int n, int l) {
    Mask m(n, l);
    for (int i = 0; i < n; ++i) m.row(i).setConstant(tasks[sz(i)].result_bits > 0.0);
    return m;
}

Mask cluster_mask(const Clusters& c, int n, int l) {
    Mask m = Mask::Constant(n, l, false);
    for (int i = 0; i < n; ++i)
        for (int j : c[sz(i)]) m(i, j) = true;
    return m;
}

// Cauchy-Schwarz rate bound L_i = B log2(1 + sum_j ||h_ij||^2 p_i / sigma^2).
double rate_bound(const ChannelState& ch, const SystemConfig& cfg, int i, double p) {
    double g = 0.0;
    for (int j = 0; j < ch.num_rrh; ++j) g += ch.h(i, j).squaredNorm();
    return cfg.bandwidth[sz(i)] * std::log2(1.0 + g * p / ch.noise_power[i]);
}

std::vector<double> power_weights(const ChannelState& ch, const SystemConfig& cfg, const std::vector<Task>& tasks,
                                  const std::vector<double>& p, bool with_tradeoff) {
    std::vector<double> w(tasks.size(), 0.0);
    for (int i = 0; i < ch.num_ue; ++i) {
        if (tasks[sz(i)].result_bits <= 0.0) continue;
        const double lb = std::max(rate_bound(ch, cfg, i, p[sz(i)]), std::numeric_limits<double>::min());
        w[sz(i)] = (with_tradeoff ? cfg.tradeoff[sz(i)] : 1.0) * tasks[sz(i)].result_bits / lb;
    }
    return w;
}

double max_l0_excess(const BeamformerSet& bf, const std::vector<double>& r, const SystemConfig& cfg, double thr) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < bf.num_rrh; ++j) {
        const double cap = cfg.fronthaul_limit[sz(j)];
        const double load = fronthaul_load_l0(j, bf, r, thr * cfg.rrh_power_limit[sz(j)]);
        worst = std::max(worst, (load - cap) / cap);
    }
    return worst;
}

// Blocks pinned by the step hold at most `elimination_power`; drop them from the start point.
BeamformerSet without_pinned(const BeamformerSet& bf, const conic::BeamformingProblem& prob) {
    BeamformerSet out = bf;
    for (int i = 0; i < bf.num_ue; ++i)
        for (int j = 0; j < bf.num_rrh; ++j)
            if (prob.pinned(i, j)) out.at(i, j).setZero();
    return out;
}

bool satisfies_fronthaul(const BeamformerSet& bf, const FronthaulWeights& rho, const std::vector<double>& frozen,
                         const SystemConfig& cfg) {
    if (!rho.active()) return true;
    for (int j = 0; j < bf.num_rrh; ++j) {
        const double cap = cfg.fronthaul_limit[sz(j)];
        if (fronthaul_load_weighted(j, bf, frozen, rho) > cap * (1.0 + 1e-9)) return false;
    }
    return true;
}

// Smallest t in [0, 1] with v + t (vhat - v) inside the frozen fronthaul
// constraints, given that vhat satisfies them. Each RRH contributes a convex
// quadratic in t.
double feasible_from(const BeamformerSet& v, const BeamformerSet& vhat, const FronthaulWeights& rho,
                     const std::vector<double>& frozen, const SystemConfig& cfg) {
    if (!rho.active()) return 0.0;
    double lo = 0.0;
    for (int j = 0; j < v.num_rrh; ++j) {
        double a = 0.0, b = 0.0, c = -cfg.fronthaul_limit[sz(j)];
        for (int i = 0; i < v.num_ue; ++i) {
            const double coef = rho.rho(i, j) * frozen[sz(i)];
            const Eigen::VectorXcd d = vhat.at(i, j) - v.at(i, j);
            a += coef * d.squaredNorm();
            b += coef * std::real(v.at(i, j).dot(d));
            c += coef * v.at(i, j).squaredNorm();
        }
        if (c <= 0.0) continue;
        const double disc = b * b - a * c;
        double t = 1.0;
        if (a > 0.0 && disc >= 0.0) t = c / (-b + std::sqrt(disc));  // smaller root, stable form
        lo = std::max(lo, std::clamp(t, 0.0, 1.0));
    }
    return lo;
}

// The user whose floor cannot be met even alone with every RRH at full power, or -1.
int diagnose_floor(const ChannelState& ch, const SystemConfig& cfg, const std::vector<double>& floors) {
    for (int i = 0; i < ch.num_ue; ++i) {
        if (!(floors[sz(i)] > 0.0)) continue;
        double amp = 0.0;
        for (int j = 0; j < ch.num_rrh; ++j) amp += std::sqrt(cfg.rrh_power_limit[sz(j)]) * ch.h(i, j).norm();
        const double best = rate_from_sinr(amp * amp / ch.noise_power[i], cfg.bandwidth[sz(i)]);
        if (best < floors[sz(i)]) return i;
    }
    return -1;
}

struct StepResult {
    bool ok = false;
    bool infeasible = false;
    BeamformerSet v;
    std::string diagnostics;
};

StepResult run_step(const conic::BeamformingProblem& prob, const conic::SolverOptions& so) {
    StepResult out;
    const conic::SolveReport rep = conic::solve(prob.embedded.problem, so);
    if (rep.optimal() || rep.near_optimal()) {
        out.ok = true;
        out.v = prob.beamformers(rep.x);
    } else {
        out.infeasible = rep.status == conic::SolveStatus::Infeasible;
        std::ostringstream os;
        os << "conic solver: " << conic::to_string(rep.status) << " after " << rep.iterations << " iterations";
        if (!rep.diagnostics.empty()) os << " (" << rep.diagnostics << ")";
        out.diagnostics = os.str();
    }
    return out;
}

void fail(RanSolution& sol, const StepResult& st, int iteration, const ChannelState& ch, const SystemConfig& cfg,
          const std::vector<double>& floors) {
    sol.iterations = iteration;
    if (st.infeasible) {
        sol.status = status::kInfeasibleRan;
        sol.infeasible_ue = diagnose_floor(ch, cfg, floors);
    } else {
        sol.status = status::kSolverFailure;
    }
    std::ostringstream os;
    os << "iteration " << iteration << ": " << st.diagnostics;
    if (sol.infeasible_ue >= 0) os << "; UE " << sol.infeasible_ue << " floor exceeds its single-user capacity";
    sol.diagnostics = os.str();
}

void finalize_ran(RanSolution& sol, const BeamformerSet& v, const ChannelState& ch, const SystemConfig& cfg,
                  const AlgorithmOptions& opt) {
    auto [clusters, vz] = extract_rrh_clusters(v, cfg.rrh_power_limit, opt.cluster_threshold);
    sol.clusters = std::move(clusters);
    sol.beamformers = std::move(vz);
    sol.rates = rates(ch, sol.beamformers, cfg);
    sol.powers = ue_powers(sol.beamformers);
}

bool floors_met(const std::vector<double>& r, const std::vector<double>& floors) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (floors[i] > 0.0 && r[i] < floors[i] * (1.0 - 1e-9)) return false;
    }
    return true;
}

}  // namespace

std::pair<Clusters, BeamformerSet> extract_rrh_clusters(const BeamformerSet& bf, const std::vector<double>& power_limits,
                                                        double threshold) {
    Clusters c(sz(bf.num_ue));
    BeamformerSet out = bf;
    for (int i = 0; i < bf.num_ue; ++i) {
        for (int j = 0; j < bf.num_rrh; ++j) {
            if (bf.at(i, j).squaredNorm() > threshold * power_limits[sz(j)]) {
                c[sz(i)].push_back(j);
            } else {
                out.at(i, j).setZero();
            }
        }
    }
    return {std::move(c), std::move(out)};
}

BeamformerSet initial_beamformers(const ChannelState& ch, const SystemConfig& cfg, const std::vector<Task>& tasks) {
    BeamformerSet v = BeamformerSet::zeros_like(ch);
    for (int i = 0; i < ch.num_ue; ++i) {
        if (tasks[sz(i)].result_bits <= 0.0) continue;
        for (int j = 0; j < ch.num_rrh; ++j) {
            const double nh = ch.h(i, j).norm();
            if (nh > 0.0) v.at(i, j) = std::sqrt(cfg.rrh_power_limit[sz(j)] / (2.0 * ch.num_ue)) * ch.h(i, j) / nh;
        }
    }
    return v;
}

RanSolution algorithm1_separate_ran(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                                    const std::vector<double>& budgets, const AlgorithmOptions& opt) {
    const int n = ch.num_ue;
    const int l = ch.num_rrh;
    if (tasks.size() != sz(n) || budgets.size() != sz(n)) throw DomainError("algorithm1: one task and budget per user");
    std::vector<double> floors(sz(n), 0.0);
    for (int i = 0; i < n; ++i) {
        if (tasks[sz(i)].result_bits > 0.0) floors[sz(i)] = min_rate_requirement(tasks[sz(i)].result_bits, budgets[sz(i)]);
    }
    const Mask payload = payload_support(tasks, n, l);

    RanSolution sol;
    sol.beamformers = BeamformerSet::zeros_like(ch);
    if (!payload.any()) {
        finalize_ran(sol, sol.beamformers, ch, cfg, opt);
        return sol;
    }

    BeamformerSet v = initial_beamformers(ch, cfg, tasks);
    FronthaulWeights rho;
    std::vector<double> frozen;
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    for (int m = 0; m < opt.max_iterations; ++m) {
        conic::BeamformingInputs in;
        in.channels = &ch;
        in.config = &cfg;
        in.rate_floors = floors;
        in.weights = rho;
        in.frozen_rates = frozen;
        in.support = payload;
        in.power_weights = power_weights(ch, cfg, tasks, ue_powers(v), false);
        in.elimination_power = opt.elimination_power;
        const auto prob = conic::build_power_min_socp(in);
        const StepResult st = run_step(prob, opt.solver);
        if (!st.ok) {
            fail(sol, st, m + 1, ch, cfg, floors);
            return sol;
        }
        v = st.v;
        const auto r = rates(ch, v, cfg);
        rho = fronthaul_weights(v, cfg.stability_epsilon);
        frozen = r;
        const auto p = ue_powers(v);
        double ptr = 0.0;
        for (int i = 0; i < n; ++i) {
            if (tasks[sz(i)].result_bits > 0.0) ptr += p[sz(i)] * tasks[sz(i)].result_bits / rate_bound(ch, cfg, i, p[sz(i)]);
        }
        sol.trace.push_back(ptr);
        sol.iterations = m + 1;
        if (m > 0 && std::abs(ptr - prev) < opt.tolerance * ptr &&
            max_l0_excess(v, r, cfg, opt.cluster_threshold) <= 1e-6) {
            converged = true;
            break;
        }
        prev = ptr;
    }

    // Re-solve on the extracted clusters so the returned powers are optimal for that support.
    {
        auto [clusters, vz] = extract_rrh_clusters(v, cfg.rrh_power_limit, opt.cluster_threshold);
        conic::BeamformingInputs in;
        in.channels = &ch;
        in.config = &cfg;
        in.rate_floors = floors;
        in.support = cluster_mask(clusters, n, l) && payload;
        in.power_weights = power_weights(ch, cfg, tasks, ue_powers(vz), false);
        in.elimination_power = opt.elimination_power;
        const StepResult st = run_step(conic::build_power_min_socp(in), opt.solver);
        if (st.ok) {
            v = st.v;
        } else {
            v = vz;
        }
    }
    finalize_ran(sol, v, ch, cfg, opt);
    sol.status = converged ? status::kOptimal : status::kMaxIterations;
    return sol;
}

namespace {

// Total energy sum_i gamma_i(r_i(v)) + eta_i p_i(v) D_i / r_i(v) over users with payload.
double energy_at(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                 const BeamformerSet& v) {
    const auto r = rates(ch, v, cfg);
    double f = 0.0;
    for (int i = 0; i < ch.num_ue; ++i) {
        const Task& t = tasks[sz(i)];
        if (t.result_bits <= 0.0) continue;
        if (!(r[sz(i)] > 0.0)) return std::numeric_limits<double>::infinity();
        f += cloud_energy_at_rate(r[sz(i)], t, cfg, i) + cfg.tradeoff[sz(i)] * ue_power(i, v) * t.result_bits / r[sz(i)];
    }
    return f;
}

double surrogate(const ChannelState& ch, const BeamformerSet& v, const std::vector<std::complex<double>>& u,
                 const std::vector<double>& phi, const std::vector<double>& offset, const std::vector<double>& w) {
    const auto e = mse_all(u, ch, v);
    double s = 0.0;
    for (int i = 0; i < ch.num_ue; ++i) s += phi[sz(i)] * e[sz(i)] + offset[sz(i)] + w[sz(i)] * ue_power(i, v);
    return s;
}

CloudAllocation recover_cloud(const SystemConfig& cfg, const std::vector<Task>& tasks, const std::vector<double>& r) {
    CloudAllocation c;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& t = tasks[i];
        const double left = t.result_bits > 0.0 ? t.deadline - t.result_bits / r[i] : t.deadline;
        const double f = std::min(t.cpu_cycles / left, cfg.clone_capacity_limit[i]);
        c.clone_capacity.push_back(f);
        c.exec_time.push_back(clone_exec_time(t.cpu_cycles, f));
        c.exec_energy.push_back(clone_energy(t.cpu_cycles, f, cfg.switched_capacitance[i], cfg.cloud_exponent[i]));
    }
    return c;
}

}  // namespace

JointSolution algorithm2_joint(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                               const AlgorithmOptions& opt) {
    const int n = ch.num_ue;
    const int l = ch.num_rrh;
    if (tasks.size() != sz(n)) throw DomainError("algorithm2: one task per user");
    std::vector<double> floors(sz(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const Task& t = tasks[sz(i)];
        const double rmin = min_rate_requirement(t.result_bits, t.deadline, t.cpu_cycles, cfg.clone_capacity_limit[sz(i)], i);
        if (t.result_bits > 0.0) floors[sz(i)] = rmin;
    }
    const Mask payload = payload_support(tasks, n, l);

    JointSolution sol;
    sol.beamformers = BeamformerSet::zeros_like(ch);
    auto assemble = [&](JointSolution& s) {
        s.cloud = recover_cloud(cfg, tasks, s.rates);
        s.energy = total_energy(cfg, tasks, s.cloud, s.beamformers, s.rates);
    };
    if (!payload.any()) {
        finalize_ran(sol, sol.beamformers, ch, cfg, opt);
        assemble(sol);
        sol.energy_trace.push_back(sol.energy.grand_total);
        return sol;
    }

    BeamformerSet v = initial_beamformers(ch, cfg, tasks);
    FronthaulWeights rho;
    std::vector<double> frozen;
    std::vector<std::complex<double>> u_prev;
    std::vector<double> phi_prev, off_prev;
    double e_prev = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    conic::BeamformingInputs last_inputs;

    for (int it = 0; it < opt.max_iterations; ++it) {
        const auto w = power_weights(ch, cfg, tasks, ue_powers(v), true);
        SurrogateStep trace;
        trace.iteration = it + 1;
        trace.before = trace.after_receiver = std::numeric_limits<double>::quiet_NaN();
        if (!u_prev.empty()) trace.before = surrogate(ch, v, u_prev, phi_prev, off_prev, w);

        // (1) receivers
        const auto u = mmse_receiver(ch, v);
        if (!u_prev.empty()) trace.after_receiver = surrogate(ch, v, u, phi_prev, off_prev, w);

        // (2) MSE weights, with the tangent offsets tau(e) - phi e that make the surrogate exact at e.
        const auto e = mse_all(u, ch, v);
        std::vector<double> phi(sz(n), 0.0), off(sz(n), 0.0);
        for (int i = 0; i < n; ++i) {
            if (tasks[sz(i)].result_bits <= 0.0) continue;
            const double ee = std::min(e[sz(i)], mse_ceiling(tasks[sz(i)], cfg, i));
            phi[sz(i)] = mse_weight(ee, tasks[sz(i)], cfg, i);
            off[sz(i)] = tau(ee, tasks[sz(i)], cfg, i) - phi[sz(i)] * ee;
        }
        trace.after_weight = surrogate(ch, v, u, phi, off, w);
        sol.last_mse = {u, e, phi};

        // (3) transmit beamformers
        conic::BeamformingInputs in;
        in.channels = &ch;
        in.config = &cfg;
        in.rate_floors = floors;
        in.weights = rho;
        in.frozen_rates = frozen;
        in.support = payload;
        in.power_weights = w;
        in.elimination_power = opt.elimination_power;
        const auto prob = conic::build_wmmse_step_socp(in, u, phi);
        const StepResult st = run_step(prob, opt.solver);
        if (!st.ok) {
            fail(sol, st, it + 1, ch, cfg, floors);
            return sol;
        }
        if (it > 0) v = without_pinned(v, prob);
        const bool feasible_start = it > 0 && satisfies_fronthaul(v, rho, frozen, cfg);
        trace.phase_change = it > 0 && !feasible_start;
        double theta = 1.0;
        if (opt.damping && it > 0) {
            // Backtrack on the energy over the fronthaul-feasible part of the segment v -> vhat.
            const double lo = feasible_start ? 0.0 : feasible_from(v, st.v, rho, frozen, cfg);
            BeamformerSet trial = v;
            auto phi_at = [&](double t) {
                trial.v = v.v + t * (st.v.v - v.v);
                return energy_at(cfg, tasks, ch, trial);
            };
            const double f0 = feasible_start ? phi_at(0.0) : std::numeric_limits<double>::infinity();
            double best_t = feasible_start ? 0.0 : 1.0;
            double best_f = feasible_start ? f0 : phi_at(1.0);
            for (double step = 1.0; step >= 1e-3; step /= 2.0) {
                const double t = lo + (1.0 - lo) * step;
                const double f = phi_at(t);
                if (feasible_start ? f <= f0 : f < best_f) {
                    best_t = t;
                    best_f = f;
                    if (feasible_start) break;
                }
            }
            if (!feasible_start && lo > 0.0 && phi_at(lo) < best_f) best_t = lo;
            theta = best_t;
            v.v = v.v + theta * (st.v.v - v.v);
        } else {
            v = st.v;
        }
        trace.step_size = theta;
        trace.after_transmit = surrogate(ch, v, u, phi, off, w);
        sol.surrogate.push_back(trace);
        last_inputs = in;

        // (4)-(6) rates, fronthaul weights, energy
        const auto r = rates(ch, v, cfg);
        rho = fronthaul_weights(v, cfg.stability_epsilon);
        frozen = r;
        const auto cloud = recover_cloud(cfg, tasks, r);
        const double energy = total_energy(cfg, tasks, cloud, v, r).grand_total;
        sol.energy_trace.push_back(energy);
        sol.iterations = it + 1;
        u_prev = u;
        phi_prev = phi;
        off_prev = off;
        if (it > 0 && std::abs(energy - e_prev) < opt.tolerance * energy &&
            max_l0_excess(v, r, cfg, opt.cluster_threshold) <= 1e-6) {
            converged = true;
            break;
        }
        e_prev = energy;
    }

    finalize_ran(sol, v, ch, cfg, opt);
    if (!floors_met(sol.rates, floors)) {
        // Zeroing sub-threshold blocks cost some rate: redo the transmit step on the clusters.
        conic::BeamformingInputs in = last_inputs;
        in.weights = fronthaul_weights(v, cfg.stability_epsilon);
        in.frozen_rates = rates(ch, v, cfg);
        in.support = cluster_mask(sol.clusters, n, l) && payload;
        const StepResult st = run_step(conic::build_wmmse_step_socp(in, sol.last_mse.receivers, sol.last_mse.weights),
                                       opt.solver);
        if (st.ok) finalize_ran(sol, st.v, ch, cfg, opt);
    }
    sol.trace = sol.energy_trace;
    assemble(sol);
    sol.status = converged ? status::kOptimal : status::kMaxIterations;
    return sol;
}

SeparateSolution separate_baseline(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                                   double alpha, const AlgorithmOptions& opt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("separate_baseline: alpha must lie in (0, 1)");
    SeparateSolution out;
    std::vector<double> cloud_deadline, budget;
    for (const Task& t : tasks) {
        cloud_deadline.push_back((1.0 - alpha) * t.deadline);
        budget.push_back(alpha * t.deadline);
    }
    out.cloud = solve_p1(tasks, cloud_deadline, cfg);
    out.ran = algorithm1_separate_ran(cfg, tasks, ch, budget, opt);
    if (out.ran.status == status::kInfeasibleRan) {
        throw InfeasibleError(InfeasibleSide::Ran, out.ran.infeasible_ue, out.ran.diagnostics);
    }
    if (!out.ran.has_solution()) throw std::runtime_error(out.ran.diagnostics);
    out.energy = total_energy(cfg, tasks, out.cloud, out.ran.beamformers, out.ran.rates);
    return out;
}

ConstraintReplay replay_constraints(const SystemConfig& cfg, const std::vector<Task>& tasks, const ChannelState& ch,
                                    const BeamformerSet& bf, const std::vector<double>& floors,
                                    const std::vector<double>& capacity, const AlgorithmOptions& opt) {
    ConstraintReplay rep;
    rep.rrh_power = rep.rate_floor = rep.fronthaul = rep.deadline = rep.clone_capacity =
        -std::numeric_limits<double>::infinity();
    auto [clusters, vz] = extract_rrh_clusters(bf, cfg.rrh_power_limit, opt.cluster_threshold);
    (void)clusters;
    const auto r = rates(ch, bf, cfg);
    for (int j = 0; j < ch.num_rrh; ++j) {
        rep.rrh_power = std::max(rep.rrh_power, rrh_power(j, bf) - cfg.rrh_power_limit[sz(j)]);
    }
    rep.fronthaul = max_l0_excess(vz, r, cfg, opt.cluster_threshold);
    for (int i = 0; i < ch.num_ue; ++i) {
        const Task& t = tasks[sz(i)];
        if (floors[sz(i)] > 0.0) rep.rate_floor = std::max(rep.rate_floor, (floors[sz(i)] - r[sz(i)]) / floors[sz(i)]);
        if (!capacity.empty()) {
            const double f = capacity[sz(i)];
            const double ttr = t.result_bits > 0.0 ? t.result_bits / r[sz(i)] : 0.0;
            rep.deadline = std::max(rep.deadline, t.cpu_cycles / f + ttr - t.deadline);
            rep.clone_capacity =
                std::max(rep.clone_capacity, (f - cfg.clone_capacity_limit[sz(i)]) / cfg.clone_capacity_limit[sz(i)]);
        }
    }
    return rep;
}

}  // namespace cranmc
