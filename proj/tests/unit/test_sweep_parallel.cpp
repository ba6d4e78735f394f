// SPDX-License-Identifier: Apache-2.0
//
// The OpenMP sweep must emit exactly what the serial loop emits.
#include "cranmc/experiments.hpp"

#include <doctest.h>

using namespace cranmc;

TEST_CASE("parallel sweep equals serial sweep") {
    SweepSpec spec;
    spec.base = load_config_file(std::string(CRANMC_DATA_DIR) + "/table1.json");
    spec.param = SweepParam::D;
    spec.grid = {500, 1500};
    spec.methods = {Method::parse("joint"), Method::parse("separate:0.5"), Method::parse("separate:0.99")};
    spec.seeds = {11, 12, 13};
    spec.workers = 4;

    auto serial = run_sweep_serial(spec);
    auto parallel = run_sweep(spec);
    REQUIRE(serial.size() == 18);
    CHECK(records_to_csv(serial, false) == records_to_csv(parallel, false));
    for (auto* rs : {&serial, &parallel})
        for (auto& r : *rs) r.wall_ms = 0.0;
    CHECK(records_to_json(serial) == records_to_json(parallel));
}
