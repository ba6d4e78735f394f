// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration, geometry and channel generation for a C-RAN whose
// BBU pool hosts one mobile clone per user.
//
// Units are fixed across the library: cycles, bits, seconds, hertz, watts,
// joules, kilometres. The only dB quantities (noise PSD in dBm/Hz and the
// path loss) are converted to linear values in this module.
#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cranmc {

struct Point {
    double x_km = 0.0;
    double y_km = 0.0;
};

double distance_km(const Point& a, const Point& b);

/// Placement of radio heads and users. Explicit positions win; otherwise the
/// RRHs sit on the corners of a square of side `side_km` (on its circumcircle
/// for L != 4) and users are dropped uniformly inside it, at least
/// `min_ue_distance_km` away from every RRH.
struct Geometry {
    double side_km = 0.03;
    double min_ue_distance_km = 0.005;
    std::vector<Point> rrh_positions;  // empty: derived from side_km
    std::vector<Point> ue_positions;   // empty: drawn from the run seed
};

struct SystemConfig {
    std::string name = "table1";
    int num_rrh = 4;
    int antennas_per_rrh = 2;
    int num_ue = 5;

    // Per-RRH.
    std::vector<double> rrh_power_limit;   // W
    std::vector<double> fronthaul_limit;   // bit/s

    // Per-UE.
    std::vector<double> clone_capacity_limit;  // cycles/s
    std::vector<double> tradeoff;              // eta, dimensionless
    std::vector<double> bandwidth;             // Hz
    std::vector<double> cloud_exponent;        // nu >= 1
    std::vector<double> switched_capacitance;  // kappa >= 0

    double stability_epsilon = 1e-10;
    double noise_psd_dbm_hz = -100.0;
    Geometry geometry;
    std::uint64_t rng_seed = 42;
};

struct Task {
    double cpu_cycles = 1500.0;  // F
    double result_bits = 1000.0;  // D
    double deadline = 0.1;       // T_max, s
};

struct Scenario {
    SystemConfig system;
    std::vector<Task> tasks;
};

/// Table-1 system with identical default tasks on every user.
Scenario default_scenario();

/// Resize every per-UE / per-RRH vector to the counts in `cfg`, broadcasting
/// a single value. Used after num_ue / num_rrh change.
void broadcast_to_counts(SystemConfig& cfg);

/// Throws ValidationError naming the first field that breaks an invariant.
void validate(const Scenario& scenario);

/// Parses a scenario JSON document (`system`, `tasks`, `geometry`, `seed`).
/// Absent fields take Table-1 defaults.
Scenario load_config(std::string_view json_text);
Scenario load_config_file(const std::filesystem::path& path);

/// 127 + 25 log10(d), d in km.
double path_loss_db(double distance_km);
double db_to_linear(double db);
/// Noise power in watts for a PSD in dBm/Hz over `bandwidth_hz`.
double noise_power_w(double psd_dbm_hz, double bandwidth_hz);

struct ChannelState {
    int num_ue = 0;
    int num_rrh = 0;
    int antennas = 0;
    /// Column i*num_rrh + j holds h_ij.
    Eigen::MatrixXcd gains;
    Eigen::VectorXd noise_power;  // W, per UE
    std::vector<Point> rrh_positions;
    std::vector<Point> ue_positions;

    auto h(int ue, int rrh) const { return gains.col(ue * num_rrh + rrh); }
    auto h(int ue, int rrh) { return gains.col(ue * num_rrh + rrh); }

    bool operator==(const ChannelState& other) const;
};

std::vector<Point> rrh_positions(const SystemConfig& cfg);
/// User positions for a run. Each user's drop uses its own RNG stream, so the
/// first N users are the same whatever num_ue is.
std::vector<Point> ue_positions(const SystemConfig& cfg, std::uint64_t seed);

/// Rayleigh-faded channels with distance-dependent path loss:
/// h_ij = sqrt(g_ij) w, w ~ CN(0, I_K), g_ij = 10^(-PL(d_ij)/10).
ChannelState generate_channels(const SystemConfig& cfg, std::uint64_t seed);

}  // namespace cranmc
