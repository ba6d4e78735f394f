// SPDX-License-Identifier: Apache-2.0
#include "cranmc/conic/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace cranmc::conic {

namespace {

// A real affine form over the kept columns.
struct RealAffine {
    Eigen::VectorXd coef;
    double constant = 0.0;
    bool zero() const { return constant == 0.0 && (coef.array() == 0.0).all(); }
};

struct Lowering {
    const ComplexProgram& prog;
    const std::vector<int>& column;
    Eigen::Index ncols;

    // Re and Im parts of sum coef^H v + constant.
    std::pair<RealAffine, RealAffine> lower(const ComplexAffine& a) const {
        RealAffine re{Eigen::VectorXd::Zero(ncols), a.constant.real()};
        RealAffine im{Eigen::VectorXd::Zero(ncols), a.constant.imag()};
        const int k = prog.block_dim;
        for (const auto& t : a.terms) {
            if (t.block < 0 || t.block >= prog.num_blocks || t.coef.size() != k) {
                throw std::invalid_argument("embed_complex: term references an invalid block");
            }
            for (int q = 0; q < k; ++q) {
                // conj(g) v = (gr - i gi)(vr + i vi) = gr vr + gi vi + i (gr vi - gi vr)
                const double gr = t.coef[q].real();
                const double gi = t.coef[q].imag();
                const int cr = column[static_cast<std::size_t>(2 * k * t.block + q)];
                const int ci = column[static_cast<std::size_t>(2 * k * t.block + k + q)];
                if (cr >= 0) {
                    re.coef[cr] += gr;
                    im.coef[cr] -= gi;
                }
                if (ci >= 0) {
                    re.coef[ci] += gi;
                    im.coef[ci] += gr;
                }
            }
        }
        return {re, im};
    }
};

}  // namespace

EmbeddedProblem embed_complex(const ComplexProgram& prog) {
    if (prog.num_blocks < 0 || prog.block_dim < 1) throw std::invalid_argument("embed_complex: bad dimensions");
    if (!prog.pinned_zero.empty() && static_cast<int>(prog.pinned_zero.size()) != prog.num_blocks) {
        throw std::invalid_argument("embed_complex: pinned_zero needs one entry per block");
    }
    EmbeddedProblem ep;
    ep.num_blocks = prog.num_blocks;
    ep.block_dim = prog.block_dim;
    const int k2 = 2 * prog.block_dim;
    ep.column.assign(static_cast<std::size_t>(prog.num_blocks) * k2, -1);
    int next = 0;
    for (int b = 0; b < prog.num_blocks; ++b) {
        if (!prog.pinned_zero.empty() && prog.pinned_zero[static_cast<std::size_t>(b)]) continue;
        for (int r = 0; r < k2; ++r) ep.column[static_cast<std::size_t>(b * k2 + r)] = next++;
    }
    ep.num_block_columns = next;
    const bool has_quad = !prog.quadratic.empty();
    if (has_quad) ep.epigraph_column = next++;
    const Eigen::Index n = next;

    Lowering low{prog, ep.column, n};

    // Objective rows.
    std::vector<RealAffine> quad_rows;
    for (const auto& q : prog.quadratic) {
        auto [re, im] = low.lower(q);
        if (!re.zero()) quad_rows.push_back(std::move(re));
        if (!im.zero()) quad_rows.push_back(std::move(im));
    }
    auto [lin, lin_im] = low.lower(prog.linear);
    (void)lin_im;

    double mag = lin.coef.lpNorm<Eigen::Infinity>();
    for (const auto& r : quad_rows) mag = std::max(mag, r.coef.squaredNorm());
    ep.objective_scale = mag > 0.0 ? 1.0 / mag : 1.0;
    const double root = std::sqrt(ep.objective_scale);

    // Cone rows: s = h - G x. An SOC entry with affine value a'x + a0 is row G = -a, h = a0.
    std::vector<Eigen::VectorXd> g_rows;
    std::vector<double> h_vals;
    auto push = [&](const Eigen::VectorXd& coef, double constant) {
        g_rows.push_back(-coef);
        h_vals.push_back(constant);
    };
    ConicProblem& pr = ep.problem;

    ep.objective_constant = prog.constant + lin.constant;
    pr.c = ep.objective_scale * lin.coef;
    if (has_quad) {
        pr.c[ep.epigraph_column] = 1.0;
        // ||scaled rows||^2 <= t  <=>  ||(t - 1, 2 rows)|| <= t + 1
        Eigen::VectorXd et = Eigen::VectorXd::Zero(n);
        et[ep.epigraph_column] = 1.0;
        push(et, 1.0);
        push(et, -1.0);
        for (const auto& r : quad_rows) push(2.0 * root * r.coef, 2.0 * root * r.constant);
        pr.cones.soc.push_back(static_cast<int>(2 + quad_rows.size()));
    } else {
        // Pure quadratic constants still count.
        for (const auto& q : prog.quadratic) ep.objective_constant += std::norm(q.constant);
    }

    for (const auto& con : prog.constraints) {
        auto [bre, bim] = low.lower(con.bound);
        (void)bim;
        std::vector<RealAffine> rows;
        for (const auto& ent : con.entries) {
            auto [re, im] = low.lower(ent);
            if (!re.zero()) rows.push_back(std::move(re));
            if (!im.zero()) rows.push_back(std::move(im));
        }
        push(bre.coef, bre.constant);
        for (const auto& r : rows) push(r.coef, r.constant);
        pr.cones.soc.push_back(static_cast<int>(1 + rows.size()));
        if (con.tag >= static_cast<int>(ep.tag_counts.size())) ep.tag_counts.resize(static_cast<std::size_t>(con.tag) + 1, 0);
        ++ep.tag_counts[static_cast<std::size_t>(con.tag)];
    }

    const auto m = static_cast<Eigen::Index>(g_rows.size());
    pr.G.resize(m, n);
    pr.h.resize(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        pr.G.row(r) = g_rows[static_cast<std::size_t>(r)].transpose();
        pr.h[r] = h_vals[static_cast<std::size_t>(r)];
    }
    pr.A.resize(0, n);
    pr.b.resize(0);
    pr.check();
    return ep;
}

Eigen::MatrixXcd EmbeddedProblem::extract(const Eigen::VectorXd& x) const {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(block_dim, num_blocks);
    for (int b = 0; b < num_blocks; ++b) {
        for (int q = 0; q < block_dim; ++q) {
            const int cr = column[static_cast<std::size_t>(2 * block_dim * b + q)];
            const int ci = column[static_cast<std::size_t>(2 * block_dim * b + block_dim + q)];
            v(q, b) = {cr >= 0 ? x[cr] : 0.0, ci >= 0 ? x[ci] : 0.0};
        }
    }
    return v;
}

Eigen::VectorXd EmbeddedProblem::embed_point(const Eigen::MatrixXcd& v) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.num_vars());
    for (int b = 0; b < num_blocks; ++b) {
        for (int q = 0; q < block_dim; ++q) {
            const int cr = column[static_cast<std::size_t>(2 * block_dim * b + q)];
            const int ci = column[static_cast<std::size_t>(2 * block_dim * b + block_dim + q)];
            if (cr >= 0) x[cr] = v(q, b).real();
            if (ci >= 0) x[ci] = v(q, b).imag();
        }
    }
    if (epigraph_column >= 0) {
        // First two rows of G/h are the t +/- 1 entries; the rest of the first SOC holds 2 sqrt(S) rows.
        const int q = problem.cones.soc.front();
        const Eigen::VectorXd vals = problem.h.segment(2, q - 2) - problem.G.middleRows(2, q - 2) * x;
        x[epigraph_column] = vals.squaredNorm() / 4.0;
    }
    return x;
}

std::complex<double> evaluate(const ComplexAffine& a, const Eigen::MatrixXcd& v) {
    std::complex<double> out = a.constant;
    for (const auto& t : a.terms) out += t.coef.dot(v.col(t.block));
    return out;
}

}  // namespace cranmc::conic
