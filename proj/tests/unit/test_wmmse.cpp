// SPDX-License-Identifier: Apache-2.0
#include "cranmc/errors.hpp"
#include "cranmc/wmmse.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cranmc;
using cd = std::complex<double>;

namespace {

ChannelState scalar_channel(cd h, double noise) {
    ChannelState ch;
    ch.num_ue = ch.num_rrh = ch.antennas = 1;
    ch.gains = Eigen::MatrixXcd::Constant(1, 1, h);
    ch.noise_power = Eigen::VectorXd::Constant(1, noise);
    return ch;
}

SystemConfig one_user() {
    SystemConfig c = default_scenario().system;
    c.num_ue = 1;
    broadcast_to_counts(c);
    return c;
}

}  // namespace

TEST_CASE("MMSE receiver") {
    const auto ch = scalar_channel(cd(1.0, 0.0), 1.0);
    CHECK(mmse_receiver(ch, BeamformerSet::zeros(1, 1, 1))[0] == cd(0.0, 0.0));

    auto bf = BeamformerSet::zeros(1, 1, 1);
    bf.at(0, 0)[0] = std::polar(3.0, 0.4);  // |h^H v|^2 = 9
    const cd u = mmse_receiver(ch, bf)[0];
    CHECK(std::abs(u) == doctest::Approx(0.3));
    CHECK(std::arg(u) == doctest::Approx(0.4));
    CHECK(mse(0, u, ch, bf) == doctest::Approx(0.1));
    CHECK(mse(0, cd(0.0, 0.0), ch, bf) == 1.0);
}

TEST_CASE("MMSE receiver is locally optimal and 1/e = 1 + SINR") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    auto cn = [&] { return cd(g(rng), g(rng)) * std::sqrt(0.5); };
    for (int t = 0; t < 30; ++t) {
        ChannelState ch;
        ch.num_ue = 3;
        ch.num_rrh = 2;
        ch.antennas = 2;
        ch.gains.resize(2, 6);
        auto bf = BeamformerSet::zeros(3, 2, 2);
        for (Eigen::Index i = 0; i < 12; ++i) {
            ch.gains.data()[i] = cn();
            bf.v.data()[i] = cn();
        }
        ch.noise_power = Eigen::VectorXd::Constant(3, 0.3);
        const auto u = mmse_receiver(ch, bf);
        const auto e = mse_all(u, ch, bf);
        const auto r = rates(ch, bf, default_scenario().system);
        for (int i = 0; i < 3; ++i) {
            for (int d = 0; d < 100; ++d) {
                const cd du = 1e-3 * std::polar(1.0, 2 * M_PI * d / 100.0);
                CHECK(mse(i, u[i] + du, ch, bf) >= e[i] - 1e-12);
            }
            CHECK(1.0 / e[i] == doctest::Approx(1.0 + sinr(i, ch, bf)).epsilon(1e-9));
            CHECK(1e7 * std::log2(1.0 / e[i]) == doctest::Approx(r[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("MSE weight") {
    SystemConfig c = one_user();
    const Task t{1500, 1000, 0.1};
    const double h = 1e-7;
    const double fd = (tau(0.5 + h, t, c, 0) - tau(0.5 - h, t, c, 0)) / (2 * h);
    CHECK(mse_weight(0.5, t, c, 0) == doctest::Approx(fd).epsilon(1e-4));

    for (double e : {1e-3, 0.1, 0.3, 0.7, 0.99}) CHECK(mse_weight(e, t, c, 0) >= 0.0);

    c.cloud_exponent[0] = 1.0;
    for (double e : {0.1, 0.5, 0.9}) CHECK(mse_weight(e, t, c, 0) == 0.0);

    CHECK_THROWS_AS(mse_weight(0.0, t, one_user(), 0), DomainError);
    CHECK_THROWS_AS(mse_weight(1.0, t, one_user(), 0), DomainError);
}

TEST_CASE("the weight is clamped at the rate floor") {
    const SystemConfig c = one_user();
    const Task t{1500, 1000, 0.1};
    const double ceiling = mse_ceiling(t, c, 0);
    CHECK(ceiling == doctest::Approx(std::exp2(-(1000 / 0.0985) / 1e7)));
    CHECK(mse_weight(std::min(0.999999, ceiling + 1e-6), t, c, 0) == mse_weight(ceiling, t, c, 0));
}

TEST_CASE("cloud energy at rate") {
    const SystemConfig c = one_user();
    const Task t{1500, 1000, 0.1};
    CHECK(cloud_energy_at_rate(2e4, t, c, 0) == doctest::Approx(13.5));
    CHECK(std::isinf(cloud_energy_at_rate(1e4, t, c, 0)));
    CHECK(tau(std::exp2(-2e4 / 1e7), t, c, 0) == doctest::Approx(13.5));
}
