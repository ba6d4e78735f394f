// SPDX-License-Identifier: Apache-2.0
//
// Seeded experiment runs and parameter sweeps, and their CSV / JSON records.
#pragma once

#include "cranmc/algorithms.hpp"
#include "cranmc/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cranmc {

namespace status {
/// An allocation came back but fails the constraint replay.
inline constexpr const char* kConstraintViolation = "constraint-violation";
}  // namespace status

struct Method {
    enum class Kind { Joint, Separate };
    Kind kind = Kind::Joint;
    double alpha = 0.5;  // transmit share of T_max for Separate

    /// "joint" or "separate:<alpha>", alpha in (0, 1).
    static Method parse(std::string_view text);
    std::string label() const;
    bool operator==(const Method&) const = default;
};

enum class SweepParam { F, D, Tmax, N };

SweepParam parse_param(std::string_view text);
std::string_view param_name(SweepParam p);

/// Comma-separated numbers.
std::vector<double> parse_grid(std::string_view text);
/// "a..b" (inclusive) or a comma-separated list.
std::vector<std::uint64_t> parse_seeds(std::string_view text);

/// `base` with the swept parameter set to `value` on every user (or, for N,
/// the user count). Throws ValidationError when the result is invalid.
Scenario apply_sweep_value(const Scenario& base, SweepParam p, double value);

struct SweepSpec {
    Scenario base;
    SweepParam param = SweepParam::F;
    std::vector<double> grid;
    std::vector<Method> methods;
    std::vector<std::uint64_t> seeds;
    int workers = 0;  // <= 0: available parallelism
    AlgorithmOptions options;

    /// Grid nonempty and strictly increasing, methods nonempty, seeds
    /// nonempty and distinct, every grid point a valid scenario.
    void validate() const;
};

struct SolutionRecord {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string method;
    std::string param;            // empty for single runs
    std::optional<double> value;  // swept value
    // Present only when status == optimal.
    std::optional<double> energy_total;
    std::optional<double> energy_cloud;
    std::optional<double> energy_tx;
    // Per-user allocation, whenever one was produced.
    std::vector<double> rates;         // bit/s
    std::vector<double> powers;        // W
    std::vector<double> cloud_energy;  // J
    std::optional<double> mean_cluster_size;
    int iterations = 0;
    std::string status;
    double wall_ms = 0.0;

    bool operator==(const SolutionRecord&) const = default;
};

SolutionRecord run_single(const Scenario& scenario, const Method& method, std::uint64_t seed,
                          const AlgorithmOptions& opt = {});

/// Every (value, method, seed) point, ordered by grid value, then method
/// position in the sweep spec, then seed position. Per-point failures become
/// statuses. The OpenMP build fans points out over `spec.workers` threads.
std::vector<SolutionRecord> run_sweep(const SweepSpec& spec);
/// Same points, one after another.
std::vector<SolutionRecord> run_sweep_serial(const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "scenario,seed,method,param,value,energy_total_j,energy_cloud_j,energy_tx_j,iterations,status,wall_ms";

/// Header line plus one line per record. `timing` false leaves wall_ms empty.
std::string records_to_csv(const std::vector<SolutionRecord>& records, bool timing = true);
std::string records_to_json(const std::vector<SolutionRecord>& records);
std::vector<SolutionRecord> records_from_json(std::string_view text);

struct AggregateRow {
    std::string param;
    double value = 0.0;
    std::string method;
    int runs = 0;
    int optimal = 0;
    double mean_total = 0.0, stdev_total = 0.0;
    double mean_cloud = 0.0, mean_tx = 0.0;
};

/// Mean and sample stdev of the optimal records per (param, value, method),
/// independent of record order.
std::vector<AggregateRow> aggregate(const std::vector<SolutionRecord>& records);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

enum class RecordFormat { Csv, Json };

/// Writes `path` in one format. Throws std::invalid_argument for an empty
/// record list and std::runtime_error when the file cannot be written.
void write_records(const std::vector<SolutionRecord>& records, const std::filesystem::path& path, RecordFormat format,
                   bool timing = true);
/// records.csv, records.json and aggregate.csv under `dir` (created if missing).
void emit_records(const std::vector<SolutionRecord>& records, const std::filesystem::path& dir, bool timing = true);

}  // namespace cranmc
