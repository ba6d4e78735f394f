// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

using cranmc::conic::ConicProblem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

ConicProblem random_socp(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> ncones(1, 3), qdim(2, 4);

    VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0[i] = unit(rng);

    std::vector<MatrixXd> blocks;
    std::vector<VectorXd> rhs;
    std::vector<int> dims;
    const int k = ncones(rng);
    for (int c = 0; c < k; ++c) {
        const int q = qdim(rng);
        MatrixXd a(q - 1, n);
        VectorXd b(q - 1), lin(n);
        for (int r = 0; r < q - 1; ++r) {
            for (int i = 0; i < n; ++i) a(r, i) = gauss(rng);
            b[r] = gauss(rng);
        }
        for (int i = 0; i < n; ++i) lin[i] = 0.3 * gauss(rng);
        const double d = (a * x0 + b).norm() - lin.dot(x0) + 0.5;
        // s = h - G x with s0 = lin'x + d, s1 = a x + b.
        MatrixXd g(q, n);
        g.row(0) = -lin.transpose();
        g.bottomRows(q - 1) = -a;
        VectorXd h(q);
        h[0] = d;
        h.tail(q - 1) = b;
        blocks.push_back(g);
        rhs.push_back(h);
        dims.push_back(q);
    }

    ConicProblem p;
    p.c.resize(n);
    for (int i = 0; i < n; ++i) p.c[i] = gauss(rng);
    int m = 2 * n;
    for (int q : dims) m += q;
    p.G = MatrixXd::Zero(m, n);
    p.h = VectorXd::Zero(m);
    p.G.topRows(n) = MatrixXd::Identity(n, n);
    p.G.middleRows(n, n) = -MatrixXd::Identity(n, n);
    p.h.head(2 * n).setConstant(3.0);
    int row = 2 * n;
    for (std::size_t c = 0; c < blocks.size(); ++c) {
        p.G.middleRows(row, dims[c]) = blocks[c];
        p.h.segment(row, dims[c]) = rhs[c];
        row += dims[c];
    }
    p.A.resize(0, n);
    p.b.resize(0);
    p.cones.orthant = 2 * n;
    p.cones.soc = dims;
    return p;
}

VectorXd project_soc(const VectorXd& v) {
    const double t = v[0];
    const double nu = v.tail(v.size() - 1).norm();
    if (nu <= t) return v;
    if (nu <= -t) return VectorXd::Zero(v.size());
    VectorXd out(v.size());
    const double a = 0.5 * (t + nu);
    out[0] = a;
    out.tail(v.size() - 1) = (a / nu) * v.tail(v.size() - 1);
    return out;
}

namespace {

// Zero cone for the equality rows, then the orthant, then each SOC.
VectorXd project(const ConicProblem& p, const VectorXd& v) {
    VectorXd out = v;
    const int eq = static_cast<int>(p.A.rows());
    out.head(eq).setZero();
    int at = eq;
    for (int i = 0; i < p.cones.orthant; ++i, ++at) out[at] = std::max(out[at], 0.0);
    for (int q : p.cones.soc) {
        out.segment(at, q) = project_soc(v.segment(at, q));
        at += q;
    }
    return out;
}

}  // namespace

SplittingResult splitting_solve(const ConicProblem& p, int max_iterations, double tol) {
    const int n = p.num_vars();
    const int eq = static_cast<int>(p.A.rows());
    const int m = eq + static_cast<int>(p.G.rows());
    MatrixXd mm(m, n);
    mm.topRows(eq) = p.A;
    mm.bottomRows(m - eq) = p.G;
    VectorXd q(m);
    q.head(eq) = p.b;
    q.tail(m - eq) = p.h;

    const double rho = 1.0, alpha = 1.6;
    const Eigen::LLT<MatrixXd> llt(mm.transpose() * mm);
    VectorXd x = VectorXd::Zero(n), s = project(p, q), u = VectorXd::Zero(m);
    SplittingResult res;
    for (int it = 1; it <= max_iterations; ++it) {
        x = llt.solve(-p.c / rho - mm.transpose() * (s - q + u));
        const VectorXd z = alpha * (mm * x) + (1.0 - alpha) * (q - s);
        const VectorXd s_prev = s;
        s = project(p, q - z - u);
        u += z + s - q;
        res.iterations = it;
        if (it % 50 == 0) {
            const double pres = (mm * x + s - q).norm();
            const double dres = rho * (mm.transpose() * (s - s_prev)).norm();
            if (pres < tol && dres < tol) break;
        }
    }
    res.x = x;
    res.objective = p.c.dot(x);
    res.primal_residual = (mm * x + project(p, q - mm * x) - q).norm();
    return res;
}

double single_link_max_rate(const SingleLink& s) {
    return std::min(s.bandwidth * std::log2(1.0 + s.gain * s.power_limit / s.noise), s.fronthaul);
}

double single_link_min_rate(const SingleLink& s) {
    return s.bits / (s.deadline - s.cycles / s.capacity_limit);
}

double single_link_energy(const SingleLink& s, double rate) {
    const double inf = std::numeric_limits<double>::infinity();
    if (!(rate > 0.0)) return inf;
    const double left = s.deadline - s.bits / rate;
    if (!(left > 0.0)) return inf;
    const double f = s.cycles / left;
    if (f > s.capacity_limit * (1.0 + 1e-12)) return inf;
    const double power = s.noise * (std::exp2(rate / s.bandwidth) - 1.0) / s.gain;
    if (power > s.power_limit * (1.0 + 1e-12)) return inf;
    return s.kappa * std::pow(f, s.nu - 1.0) * s.cycles + s.eta * power * s.bits / rate;
}

RateSearch single_link_search(const SingleLink& s, int grid) {
    const double lo = single_link_min_rate(s), hi = single_link_max_rate(s);
    RateSearch best{lo, single_link_energy(s, lo)};
    int best_k = 0;
    for (int k = 1; k <= grid; ++k) {
        const double r = lo + (hi - lo) * k / grid;
        const double e = single_link_energy(s, r);
        if (e < best.energy) {
            best = {r, e};
            best_k = k;
        }
    }
    double a = lo + (hi - lo) * std::max(best_k - 1, 0) / grid;
    double b = lo + (hi - lo) * std::min(best_k + 1, grid) / grid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200 && b - a > 1e-12 * b; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (single_link_energy(s, c) < single_link_energy(s, d)) b = d;
        else a = c;
    }
    const double r = 0.5 * (a + b);
    const double e = single_link_energy(s, r);
    if (e < best.energy) best = {r, e};
    return best;
}

}  // namespace oracle
