// SPDX-License-Identifier: Apache-2.0
#include "cranmc/errors.hpp"
#include "cranmc/ran_model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cranmc;
using cd = std::complex<double>;

namespace {

ChannelState make_channels(int n, int l, int k, double noise) {
    ChannelState ch;
    ch.num_ue = n;
    ch.num_rrh = l;
    ch.antennas = k;
    ch.gains = Eigen::MatrixXcd::Zero(k, n * l);
    ch.noise_power = Eigen::VectorXd::Constant(n, noise);
    return ch;
}

struct Random {
    std::mt19937_64 rng{77};
    std::normal_distribution<double> g{0.0, 1.0};
    cd cn() { return cd(g(rng), g(rng)) * std::sqrt(0.5); }
    void fill(Eigen::MatrixXcd& m, double scale = 1.0) {
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * cn();
    }
};

}  // namespace

TEST_CASE("SINR examples") {
    auto ch = make_channels(1, 1, 1, 0.1);
    auto bf = BeamformerSet::zeros(1, 1, 1);
    ch.h(0, 0)[0] = 1.0;
    bf.at(0, 0)[0] = 1.0;
    CHECK(sinr(0, ch, bf) == doctest::Approx(10.0));
    CHECK(sinr(0, ch, BeamformerSet::zeros(1, 1, 1)) == 0.0);

    auto ch2 = make_channels(2, 1, 2, 0.25);
    auto bf2 = BeamformerSet::zeros(2, 1, 2);
    ch2.h(0, 0) << 1.0, 0.0;
    ch2.h(1, 0) << 1.0, 0.0;
    bf2.at(0, 0) << 0.5, 0.0;
    bf2.at(1, 0) << 0.5, 0.0;
    CHECK(sinr(0, ch2, bf2) == doctest::Approx(0.5));
    CHECK(sinr(1, ch2, bf2) == doctest::Approx(0.5));
}

TEST_CASE("rate examples") {
    CHECK(rate_from_sinr(1.0, 1e7) == doctest::Approx(1e7));
    CHECK(rate_from_sinr(0.0, 1e7) == 0.0);
    CHECK(rate_from_sinr(10.0, 1e7) == doctest::Approx(1e7 * std::log2(11.0)));
    CHECK(rate_from_sinr(10.0, 1e7) == doctest::Approx(3.459e7).epsilon(1e-3));
    auto ch = make_channels(1, 1, 1, 0.1);
    CHECK_THROWS_AS(rate(0, ch, BeamformerSet::zeros(1, 1, 1), 0.0), DomainError);
}

TEST_CASE("transmit cost") {
    const auto c = transmit_cost(1000, 2e4, 0.01);
    CHECK(c.time == doctest::Approx(0.05));
    CHECK(c.energy == doctest::Approx(5e-4));
    const auto z = transmit_cost(0, 0, 3.0);
    CHECK(z.time == 0.0);
    CHECK(z.energy == 0.0);
    CHECK_THROWS_AS(transmit_cost(1000, 0, 1.0), DomainError);
}

TEST_CASE("per-RRH power") {
    CHECK(rrh_power(0, BeamformerSet::zeros(2, 1, 2)) == 0.0);
    auto bf = BeamformerSet::zeros(2, 1, 2);
    bf.at(0, 0) << 1.0, 0.0;
    bf.at(1, 0) << 0.0, 1.0;
    CHECK(rrh_power(0, bf) == doctest::Approx(2.0));
    auto one = BeamformerSet::zeros(1, 1, 2);
    one.at(0, 0) << 0.6, 0.8;
    CHECK(rrh_power(0, one) == doctest::Approx(1.0));
}

TEST_CASE("fronthaul weights") {
    auto bf = BeamformerSet::zeros(3, 1, 1);
    bf.at(1, 0)[0] = std::sqrt(1e-10);
    bf.at(2, 0)[0] = 1.0;
    const auto w = fronthaul_weights(bf, 1e-10);
    CHECK(w.rho(0, 0) == doctest::Approx(1e10));
    CHECK(w.rho(1, 0) == doctest::Approx(5e9));
    CHECK(w.rho(2, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(fronthaul_weights(bf, 0.0), DomainError);
}

TEST_CASE("fronthaul loads") {
    auto bf = BeamformerSet::zeros(2, 1, 1);
    bf.at(1, 0)[0] = 0.3;
    const std::vector<double> r{1e6, 2e6};
    CHECK(fronthaul_load_l0(0, bf, r, 1e-6) == 2e6);
    const auto zero = BeamformerSet::zeros(2, 1, 1);
    CHECK(fronthaul_load_weighted(0, zero, r, fronthaul_weights(zero, 1e-10)) == 0.0);

    auto full = BeamformerSet::zeros(2, 1, 1);
    full.at(0, 0)[0] = 1.0;
    full.at(1, 0)[0] = 1.0;
    CHECK(fronthaul_load_weighted(0, full, r, fronthaul_weights(full, 1e-10)) == doctest::Approx(3e6).epsilon(1e-6));
}

TEST_CASE("l0 and weighted loads agree once entries are well separated from zero") {
    Random rnd;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        auto bf = BeamformerSet::zeros(4, 3, 2);
        rnd.fill(bf.v);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) {
                if (u(rnd.rng) < 0.4) bf.at(i, j).setZero();
                else if (bf.at(i, j).squaredNorm() < 1e4 * 1e-10) bf.at(i, j) *= 10.0;
            }
        const std::vector<double> r{1e6, 2e6, 3e5, 4e6};
        const auto w = fronthaul_weights(bf, 1e-10);
        for (int j = 0; j < 3; ++j) {
            const double l0 = fronthaul_load_l0(j, bf, r, 0.0);
            const double wl = fronthaul_load_weighted(j, bf, r, w);
            CHECK(std::abs(l0 - wl) <= 1e-6 * std::max(l0, 1.0));
        }
    }
}

TEST_CASE("minimum rate requirement") {
    CHECK(min_rate_requirement(1000, 0.05) == doctest::Approx(2e4));
    CHECK(min_rate_requirement(1000, 0.1, 1500, 1e6) == doctest::Approx(1000 / 0.0985));
    CHECK(min_rate_requirement(1000, 0.1, 1500, 1e6) == doctest::Approx(1.01523e4).epsilon(1e-5));
    CHECK_THROWS_AS(min_rate_requirement(1000, 0.001, 1500, 1e6), InfeasibleError);
}

TEST_CASE("total energy accounting") {
    SystemConfig cfg = default_scenario().system;
    cfg.num_ue = 2;
    broadcast_to_counts(cfg);
    std::vector<Task> tasks{Task{1500, 1000, 0.1}, Task{1500, 1000, 0.1}};
    // E^Tr = p D / r = 0.05 J with D = 1000, r = 2e4, p = 1.
    auto e = total_energy(cfg, tasks, {13.5, 0.5}, {1.0, 0.0}, {2e4, 2e4});
    CHECK(e.total[0] == doctest::Approx(14.0));
    CHECK(e.transmit[0] == doctest::Approx(0.05));
    e = total_energy(cfg, tasks, {14.0, 1.0}, {0.0, 0.0}, {2e4, 2e4});
    CHECK(e.grand_total == doctest::Approx(15.0));
    CHECK(e.grand_total == e.cloud_total + e.transmit_total);

    cfg.tradeoff = {0.0, 0.0};
    e = total_energy(cfg, tasks, {13.5, 1.0}, {1.0, 1.0}, {2e4, 2e4});
    CHECK(e.total[0] == 13.5);
    CHECK_THROWS_AS(total_energy(cfg, tasks, {1, 1}, {1, 1}, {0, 1}), DomainError);
}

TEST_CASE("per-user phase rotations change nothing") {
    Random rnd;
    SystemConfig cfg = default_scenario().system;
    std::vector<Task> tasks(5);
    for (int t = 0; t < 50; ++t) {
        auto ch = make_channels(5, 4, 2, 1e-2);
        rnd.fill(ch.gains);
        auto bf = BeamformerSet::zeros(5, 4, 2);
        rnd.fill(bf.v, 0.3);
        auto rot = bf;
        for (int i = 0; i < 5; ++i) {
            const cd ph = std::polar(1.0, 0.7 * i + 0.1 * t);
            for (int j = 0; j < 4; ++j) rot.at(i, j) *= ph;
        }
        const auto r0 = rates(ch, bf, cfg), r1 = rates(ch, rot, cfg);
        for (int i = 0; i < 5; ++i) {
            CHECK(sinr(i, ch, rot) == doctest::Approx(sinr(i, ch, bf)).epsilon(1e-12));
            CHECK(r1[i] == doctest::Approx(r0[i]).epsilon(1e-12));
        }
        const auto w = fronthaul_weights(bf, 1e-10);
        for (int j = 0; j < 4; ++j) {
            CHECK(rrh_power(j, rot) == doctest::Approx(rrh_power(j, bf)).epsilon(1e-12));
            CHECK(fronthaul_load_weighted(j, rot, r0, w) == doctest::Approx(fronthaul_load_weighted(j, bf, r0, w)).epsilon(1e-12));
            CHECK(fronthaul_load_l0(j, rot, r0, 1e-6) == fronthaul_load_l0(j, bf, r0, 1e-6));
        }
        CloudAllocation c;
        c.exec_energy.assign(5, 1.0);
        c.clone_capacity.assign(5, 1e5);
        c.exec_time.assign(5, 0.01);
        CHECK(total_energy(cfg, tasks, c, rot, r1).grand_total ==
              doctest::Approx(total_energy(cfg, tasks, c, bf, r0).grand_total).epsilon(1e-12));
    }
}

TEST_CASE("the rate cone holds exactly when the rate meets R") {
    Random rnd;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double bandwidth = 1e7;
    int agree = 0;
    for (int t = 0; t < 1000; ++t) {
        auto ch = make_channels(3, 2, 2, 0.05 + u(rnd.rng));
        rnd.fill(ch.gains);
        auto bf = BeamformerSet::zeros(3, 2, 2);
        rnd.fill(bf.v);
        // Rotate user 0's beamformers so its own cross gain is real and positive.
        const auto a = cross_gains(ch, bf);
        const cd ph = std::conj(a(0, 0)) / std::abs(a(0, 0));
        for (int j = 0; j < 2; ++j) bf.at(0, j) *= ph;
        const auto b = cross_gains(ch, bf);
        REQUIRE(std::abs(b(0, 0).imag()) < 1e-12);
        const double r = rate(0, ch, bf, bandwidth);
        const double target = r * (0.5 + u(rnd.rng));
        const double c = 1.0 - std::exp2(-target / bandwidth);
        double norm2 = ch.noise_power[0];
        for (int k = 0; k < 3; ++k) norm2 += std::norm(b(0, k));
        const bool cone = b(0, 0).real() >= std::sqrt(c) * std::sqrt(norm2);
        agree += cone == (r >= target);
    }
    CHECK(agree == 1000);
}
