// SPDX-License-Identifier: Apache-2.0
#include "cranmc/conic/builders.hpp"

#include <cmath>
#include <stdexcept>

namespace cranmc::conic {

namespace {

struct Frame {
    const ChannelState& ch;
    const SystemConfig& cfg;
    int n, l, k;
    std::vector<double> sigma;

    int block(int ue, int rrh) const { return ue * l + rrh; }
    Eigen::VectorXcd hn(int ue, int rrh) const { return ch.h(ue, rrh) / sigma[static_cast<std::size_t>(ue)]; }

    // a~_ik over the free blocks of user k.
    ComplexAffine cross(int i, int kk, double scale, const Eigen::Array<bool, -1, -1>& pinned) const {
        ComplexAffine a;
        for (int j = 0; j < l; ++j) {
            if (pinned(kk, j)) continue;
            a.terms.push_back({block(kk, j), scale * hn(i, j)});
        }
        return a;
    }
};

Frame make_frame(const BeamformingInputs& in) {
    if (!in.channels || !in.config) throw std::invalid_argument("beamforming builder: missing channels or config");
    const ChannelState& ch = *in.channels;
    Frame f{ch, *in.config, ch.num_ue, ch.num_rrh, ch.antennas, {}};
    for (int i = 0; i < f.n; ++i) f.sigma.push_back(std::sqrt(ch.noise_power[i]));
    const auto n = static_cast<std::size_t>(f.n);
    if (in.rate_floors.size() != n) throw std::invalid_argument("beamforming builder: one rate floor per user");
    if (in.power_weights.size() != n) throw std::invalid_argument("beamforming builder: one power weight per user");
    if (in.weights.active()) {
        if (in.weights.rho.rows() != f.n || in.weights.rho.cols() != f.l || in.frozen_rates.size() != n) {
            throw std::invalid_argument("beamforming builder: fronthaul data has wrong dimensions");
        }
    }
    if (in.support.size() > 0 && (in.support.rows() != f.n || in.support.cols() != f.l)) {
        throw std::invalid_argument("beamforming builder: support must be N x L");
    }
    return f;
}

Eigen::Array<bool, -1, -1> pinned_blocks(const Frame& f, const BeamformingInputs& in) {
    Eigen::Array<bool, -1, -1> pin = Eigen::Array<bool, -1, -1>::Constant(f.n, f.l, false);
    if (in.support.size() > 0) pin = !in.support;
    if (in.weights.active()) {
        for (int i = 0; i < f.n; ++i) {
            for (int j = 0; j < f.l; ++j) {
                const double coef = in.weights.rho(i, j) * in.frozen_rates[static_cast<std::size_t>(i)];
                const double cap = f.cfg.fronthaul_limit[static_cast<std::size_t>(j)];
                if (coef > 0.0 && cap / coef < in.elimination_power) pin(i, j) = true;
            }
        }
    }
    return pin;
}

ComplexProgram base_program(const Frame& f, const BeamformingInputs& in, const Eigen::Array<bool, -1, -1>& pin) {
    ComplexProgram prog;
    prog.num_blocks = f.n * f.l;
    prog.block_dim = f.k;
    prog.pinned_zero.resize(static_cast<std::size_t>(prog.num_blocks));
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.l; ++j) prog.pinned_zero[static_cast<std::size_t>(f.block(i, j))] = pin(i, j);

    auto component = [&](int blk, int q, double scale) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(f.k);
        e[q] = scale;
        ComplexAffine a;
        a.terms.push_back({blk, e});
        return a;
    };

    // Power penalty.
    for (int i = 0; i < f.n; ++i) {
        const double w = in.power_weights[static_cast<std::size_t>(i)];
        if (w < 0.0) throw std::invalid_argument("beamforming builder: power weights must be >= 0");
        if (w == 0.0) continue;
        for (int j = 0; j < f.l; ++j) {
            if (pin(i, j)) continue;
            for (int q = 0; q < f.k; ++q) prog.quadratic.push_back(component(f.block(i, j), q, std::sqrt(w)));
        }
    }

    // Per-RRH power.
    for (int j = 0; j < f.l; ++j) {
        NormConstraint c;
        c.tag = kPowerCone;
        c.bound.constant = std::sqrt(f.cfg.rrh_power_limit[static_cast<std::size_t>(j)]);
        for (int i = 0; i < f.n; ++i) {
            if (pin(i, j)) continue;
            for (int q = 0; q < f.k; ++q) c.entries.push_back(component(f.block(i, j), q, 1.0));
        }
        prog.constraints.push_back(std::move(c));
    }

    // Rate floors.
    for (int i = 0; i < f.n; ++i) {
        const double r = in.rate_floors[static_cast<std::size_t>(i)];
        if (!(r > 0.0)) continue;
        const double cc = -std::expm1(-r / f.cfg.bandwidth[static_cast<std::size_t>(i)] * std::log(2.0));
        const double sc = std::sqrt(cc);
        NormConstraint c;
        c.tag = kRateCone;
        c.bound = f.cross(i, i, 1.0, pin);
        for (int kk = 0; kk < f.n; ++kk) c.entries.push_back(f.cross(i, kk, sc, pin));
        ComplexAffine one;
        one.constant = sc;
        c.entries.push_back(one);
        prog.constraints.push_back(std::move(c));
    }

    // Fronthaul with frozen rates.
    if (in.weights.active()) {
        for (int j = 0; j < f.l; ++j) {
            NormConstraint c;
            c.tag = kFronthaulCone;
            c.bound.constant = 1.0;
            const double cap = f.cfg.fronthaul_limit[static_cast<std::size_t>(j)];
            for (int i = 0; i < f.n; ++i) {
                if (pin(i, j)) continue;
                const double coef = in.weights.rho(i, j) * in.frozen_rates[static_cast<std::size_t>(i)] / cap;
                if (!(coef > 0.0)) continue;
                for (int q = 0; q < f.k; ++q) c.entries.push_back(component(f.block(i, j), q, std::sqrt(coef)));
            }
            if (!c.entries.empty()) prog.constraints.push_back(std::move(c));
        }
    }
    return prog;
}

BeamformingProblem finish(const Frame& f, const ComplexProgram& prog, const Eigen::Array<bool, -1, -1>& pin) {
    BeamformingProblem bp;
    bp.embedded = embed_complex(prog);
    bp.num_ue = f.n;
    bp.num_rrh = f.l;
    bp.antennas = f.k;
    bp.pinned = pin;
    return bp;
}

}  // namespace

BeamformerSet BeamformingProblem::beamformers(const Eigen::VectorXd& x) const {
    BeamformerSet b = BeamformerSet::zeros(num_ue, num_rrh, antennas);
    b.v = embedded.extract(x);
    return b;
}

BeamformingProblem build_power_min_socp(const BeamformingInputs& in) {
    const Frame f = make_frame(in);
    const auto pin = pinned_blocks(f, in);
    return finish(f, base_program(f, in, pin), pin);
}

BeamformingProblem build_wmmse_step_socp(const BeamformingInputs& in, const std::vector<std::complex<double>>& receivers,
                                         const std::vector<double>& mse_weights) {
    const Frame f = make_frame(in);
    const auto n = static_cast<std::size_t>(f.n);
    if (receivers.size() != n || mse_weights.size() != n) {
        throw std::invalid_argument("wmmse builder: one receiver and one weight per user");
    }
    const auto pin = pinned_blocks(f, in);
    ComplexProgram prog = base_program(f, in, pin);
    for (int i = 0; i < f.n; ++i) {
        const double phi = mse_weights[static_cast<std::size_t>(i)];
        if (phi < 0.0 || !std::isfinite(phi)) throw std::invalid_argument("wmmse builder: weights must be finite and >= 0");
        const std::complex<double> u = receivers[static_cast<std::size_t>(i)] * f.sigma[static_cast<std::size_t>(i)];
        if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) throw std::invalid_argument("wmmse builder: receiver not finite");
        if (phi == 0.0) continue;
        prog.constant += phi * (std::norm(u) + 1.0);
        const double qs = std::sqrt(phi) * std::abs(u);
        if (qs > 0.0) {
            for (int kk = 0; kk < f.n; ++kk) prog.quadratic.push_back(f.cross(i, kk, qs, pin));
        }
        for (int j = 0; j < f.l; ++j) {
            if (pin(i, j)) continue;
            prog.linear.terms.push_back({f.block(i, j), -2.0 * phi * u * f.hn(i, j)});
        }
    }
    return finish(f, prog, pin);
}

}  // namespace cranmc::conic
