// SPDX-License-Identifier: Apache-2.0
//
// cranmc run   --config s.json --method joint --seed 42 [--out r.csv] [--format csv|json]
// cranmc sweep --config s.json --param F --grid 1000,1500 --methods joint,separate:0.5
//              --seeds 1..20 --out dir [--workers n] [--no-timing]
// cranmc conic problem.txt
//
// Exit codes: 0 success, 2 configuration / usage error, 3 I/O error.
#include "cranmc/conic/interchange.hpp"
#include "cranmc/conic/solver.hpp"
#include "cranmc/errors.hpp"
#include "cranmc/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

cranmc::Scenario load(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw IoError("cannot read " + path);
    try {
        return cranmc::load_config_file(path);
    } catch (const nlohmann::json::exception& e) {
        throw cranmc::ValidationError("config", e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint cloud/radio energy minimization for C-RAN mobile clones"};
    app.require_subcommand(1);

    std::string config, method_text = "joint", out, format = "csv";
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "solve one seeded scenario");
    run->add_option("--config", config, "scenario JSON")->required();
    run->add_option("--method", method_text, "joint | separate:<alpha>");
    auto* seed_opt = run->add_option("--seed", seed, "channel / placement seed (default: the config seed)");
    run->add_option("--out", out, "output file (default: stdout)");
    run->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    std::string param, grid, methods = "joint", seeds, out_dir;
    int workers = 0;
    bool no_timing = false, serial = false;
    auto* sweep = app.add_subcommand("sweep", "grid x methods x seeds sweep");
    sweep->add_option("--config", config, "scenario JSON")->required();
    sweep->add_option("--param", param, "F | D | Tmax | N")->required();
    sweep->add_option("--grid", grid, "comma-separated increasing values")->required();
    sweep->add_option("--methods", methods, "comma-separated methods");
    sweep->add_option("--seeds", seeds, "a..b or comma-separated list")->required();
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--workers", workers, "worker threads (default: available parallelism)");
    sweep->add_flag("--no-timing", no_timing, "leave wall_ms empty, for reproducible files");
    sweep->add_flag("--serial", serial, "run points one after another");

    std::string problem_path;
    auto* conic = app.add_subcommand("conic", "solve a conic problem file");
    conic->add_option("problem", problem_path, "problem in the text interchange format")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            const auto scenario = load(config);
            const auto method = cranmc::Method::parse(method_text);
            const auto rec = cranmc::run_single(scenario, method, *seed_opt ? seed : scenario.system.rng_seed);
            const auto fmt = format == "json" ? cranmc::RecordFormat::Json : cranmc::RecordFormat::Csv;
            if (out.empty()) {
                std::cout << (fmt == cranmc::RecordFormat::Json ? cranmc::records_to_json({rec})
                                                                 : cranmc::records_to_csv({rec}));
            } else {
                try {
                    cranmc::write_records({rec}, out, fmt);
                } catch (const std::runtime_error& e) {
                    throw IoError(e.what());
                }
            }
        } else if (*sweep) {
            cranmc::SweepSpec spec;
            spec.base = load(config);
            spec.param = cranmc::parse_param(param);
            spec.grid = cranmc::parse_grid(grid);
            for (auto m : CLI::detail::split(methods, ',')) spec.methods.push_back(cranmc::Method::parse(m));
            spec.seeds = cranmc::parse_seeds(seeds);
            spec.workers = workers;
            spec.validate();
            const auto records = serial ? cranmc::run_sweep_serial(spec) : cranmc::run_sweep(spec);
            try {
                cranmc::emit_records(records, out_dir, !no_timing);
            } catch (const std::runtime_error& e) {
                throw IoError(e.what());
            }
            std::fprintf(stderr, "%zu records -> %s\n", records.size(), out_dir.c_str());
        } else if (*conic) {
            std::ifstream in(problem_path);
            if (!in) throw IoError("cannot read " + problem_path);
            const auto problem = cranmc::conic::read_problem(in);
            const auto rep = cranmc::conic::solve(problem);
            std::printf("status %s\nprimal_objective %.12g\ndual_objective %.12g\niterations %d\n",
                        std::string(cranmc::conic::to_string(rep.status)).c_str(), rep.primal_objective, rep.dual_objective,
                        rep.iterations);
            for (Eigen::Index k = 0; k < rep.x.size(); ++k) std::printf("x[%ld] %.12g\n", static_cast<long>(k), rep.x[k]);
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kIoError;
    } catch (const cranmc::ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
    return kOk;
}
