// SPDX-License-Identifier: Apache-2.0
#include "cranmc/errors.hpp"
#include "cranmc/experiments.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace cranmc;

namespace {

Scenario table1() { return load_config_file(std::string(CRANMC_DATA_DIR) + "/table1.json"); }

std::string read(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("method, parameter, grid and seed parsing") {
    CHECK(Method::parse("joint").kind == Method::Kind::Joint);
    const Method m = Method::parse("separate:0.25");
    CHECK(m.kind == Method::Kind::Separate);
    CHECK(m.alpha == 0.25);
    CHECK(m.label() == "separate:0.25");
    CHECK_THROWS_AS(Method::parse("separate:1.5"), ValidationError);
    CHECK_THROWS_AS(Method::parse("greedy"), ValidationError);
    CHECK(parse_param("Tmax") == SweepParam::Tmax);
    CHECK_THROWS_AS(parse_param("X"), ValidationError);
    CHECK(parse_grid("1000, 1500,2000") == std::vector<double>{1000, 1500, 2000});
    CHECK(parse_seeds("3..6") == std::vector<std::uint64_t>{3, 4, 5, 6});
    CHECK(parse_seeds("7,1") == std::vector<std::uint64_t>{7, 1});
    CHECK_THROWS_AS(parse_seeds("a..b"), ValidationError);
}

TEST_CASE("sweep specs are validated") {
    SweepSpec spec;
    spec.base = table1();
    spec.grid = {1000, 1500};
    spec.methods = {Method{}};
    spec.seeds = {1, 2};
    CHECK_NOTHROW(spec.validate());
    spec.grid = {1500, 1000};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec.grid = {1000, 1500};
    spec.seeds = {1, 1};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec.seeds = {1};
    spec.param = SweepParam::N;
    spec.grid = {2.5};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("adding a user copies the last one") {
    const Scenario s = apply_sweep_value(table1(), SweepParam::N, 6);
    CHECK(s.system.num_ue == 6);
    CHECK(s.tasks.size() == 6);
    CHECK(s.system.tradeoff.size() == 6);
    const Scenario t = apply_sweep_value(table1(), SweepParam::Tmax, 0.08);
    for (const Task& k : t.tasks) CHECK(k.deadline == 0.08);
}

TEST_CASE("single runs") {
    const Scenario s = table1();
    const auto a = run_single(s, Method{}, 42);
    auto b = run_single(s, Method{}, 42);
    b.wall_ms = a.wall_ms;
    CHECK(a == b);
    CHECK(records_to_csv({a}, false) == records_to_csv({b}, false));

    // Schema: an optimal record carries energies and per-user allocation.
    REQUIRE(a.status == status::kOptimal);
    CHECK(a.energy_total.has_value());
    CHECK(a.rates.size() == 5);
    CHECK(a.powers.size() == 5);
    CHECK(*a.energy_total == doctest::Approx(*a.energy_cloud + *a.energy_tx).epsilon(1e-12));
    const auto replay = total_energy(s.system, s.tasks, a.cloud_energy, a.powers, a.rates);
    CHECK(std::abs(replay.grand_total - *a.energy_total) <= 1e-9);

    const auto inf = run_single(s, Method::parse("separate:0.99"), 42);
    CHECK(inf.status == status::kInfeasibleCloud);
    CHECK_FALSE(inf.energy_total.has_value());
    CHECK_FALSE(inf.energy_cloud.has_value());
}

TEST_CASE("sweep cardinality, emission and JSON round trip") {
    SweepSpec spec;
    spec.base = table1();
    spec.param = SweepParam::F;
    spec.grid = {1000, 1500, 2000};
    spec.methods = {Method{}};
    spec.seeds = parse_seeds("1..20");
    const auto recs = run_sweep(spec);
    REQUIRE(recs.size() == 60);
    for (std::size_t k = 0; k < recs.size(); ++k) {
        CHECK(recs[k].value == spec.grid[k / 20]);
        CHECK(recs[k].seed == spec.seeds[k % 20]);
        if (recs[k].status != status::kOptimal) CHECK_FALSE(recs[k].energy_total.has_value());
    }

    const std::string csv = records_to_csv(recs);
    CHECK(lines(csv) == 61);
    CHECK(csv.substr(0, csv.find('\n')) == kCsvHeader);

    CHECK(records_from_json(records_to_json(recs)) == recs);

    // Aggregates do not depend on record order.
    auto shuffled = recs;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(4));
    CHECK(aggregate_to_csv(aggregate(shuffled)) == aggregate_to_csv(aggregate(recs)));
    const auto rows = aggregate(recs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].runs == 20);

    const auto dir = std::filesystem::temp_directory_path() / "cranmc_emit_test";
    std::filesystem::remove_all(dir);
    emit_records(recs, dir, false);
    CHECK(lines(read(dir / "records.csv")) == 61);
    CHECK(lines(read(dir / "aggregate.csv")) == 4);
    CHECK(records_from_json(read(dir / "records.json")).size() == 60);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(emit_records({}, dir), std::invalid_argument);
    CHECK_THROWS_AS(write_records(recs, "/nonexistent/dir/x.csv", RecordFormat::Csv), std::runtime_error);
}
