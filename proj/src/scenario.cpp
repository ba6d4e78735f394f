// SPDX-License-Identifier: Apache-2.0
#include "cranmc/scenario.hpp"

#include "cranmc/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace cranmc {

using nlohmann::json;

namespace {

constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kFadingStream = 2;

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

void resize_broadcast(std::vector<double>& v, int n, double fallback) {
    if (v.empty()) {
        v.assign(static_cast<std::size_t>(n), fallback);
    } else if (static_cast<int>(v.size()) != n) {
        v.assign(static_cast<std::size_t>(n), v.front());
    }
}

void require_size(const std::vector<double>& v, int n, const char* field) {
    if (static_cast<int>(v.size()) != n) {
        throw ValidationError(field, "expected " + std::to_string(n) + " entries, got " +
                                         std::to_string(v.size()));
    }
}

template <class Pred>
void require_each(const std::vector<double>& v, const char* field, Pred ok, const char* rule) {
    for (double x : v) {
        if (!std::isfinite(x) || !ok(x)) {
            std::ostringstream os;
            os << "value " << x << " violates " << rule;
            throw ValidationError(field, os.str());
        }
    }
}

// Scalar or array field -> vector. Arrays are taken verbatim (length checked by validate()).
std::vector<double> read_numbers(const json& node, const char* field) {
    if (node.is_number()) return {node.get<double>()};
    if (node.is_array()) {
        std::vector<double> out;
        for (const auto& x : node) {
            if (!x.is_number()) throw ValidationError(field, "array entries must be numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    throw ValidationError(field, "expected a number or an array of numbers");
}

double read_number(const json& node, const char* field) {
    if (!node.is_number()) throw ValidationError(field, "expected a number");
    return node.get<double>();
}

int read_count(const json& node, const char* field) {
    if (!node.is_number_integer()) throw ValidationError(field, "expected an integer");
    return node.get<int>();
}

std::vector<Point> read_points(const json& node, const char* field) {
    if (!node.is_array()) throw ValidationError(field, "expected an array of [x_km, y_km] pairs");
    std::vector<Point> out;
    for (const auto& p : node) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ValidationError(field, "expected [x_km, y_km]");
        }
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.contains(key)) throw ValidationError(key, "unknown key in " + where);
    }
}

Task read_task(const json& node) {
    if (!node.is_object()) throw ValidationError("tasks", "each task must be an object");
    reject_unknown(node, {"cpu_cycles", "result_bits", "deadline"}, "task");
    for (const char* key : {"cpu_cycles", "result_bits", "deadline"}) {
        if (!node.contains(key)) throw ValidationError(key, "missing required task field");
    }
    Task t;
    t.cpu_cycles = read_number(node.at("cpu_cycles"), "cpu_cycles");
    t.result_bits = read_number(node.at("result_bits"), "result_bits");
    t.deadline = read_number(node.at("deadline"), "deadline");
    return t;
}

}  // namespace

double distance_km(const Point& a, const Point& b) {
    return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

void broadcast_to_counts(SystemConfig& cfg) {
    resize_broadcast(cfg.rrh_power_limit, cfg.num_rrh, 1.0);
    resize_broadcast(cfg.fronthaul_limit, cfg.num_rrh, 1e7);
    resize_broadcast(cfg.clone_capacity_limit, cfg.num_ue, 1e6);
    resize_broadcast(cfg.tradeoff, cfg.num_ue, 10.0);
    resize_broadcast(cfg.bandwidth, cfg.num_ue, 1e7);
    resize_broadcast(cfg.cloud_exponent, cfg.num_ue, 3.0);
    resize_broadcast(cfg.switched_capacitance, cfg.num_ue, 1e-11);
}

Scenario default_scenario() {
    Scenario s;
    broadcast_to_counts(s.system);
    s.tasks.assign(static_cast<std::size_t>(s.system.num_ue), Task{});
    return s;
}

void validate(const Scenario& scenario) {
    const SystemConfig& c = scenario.system;
    if (c.num_rrh < 1) throw ValidationError("num_rrh", "must be >= 1");
    if (c.antennas_per_rrh < 1) throw ValidationError("antennas_per_rrh", "must be >= 1");
    if (c.num_ue < 1) throw ValidationError("num_ue", "must be >= 1");

    require_size(c.rrh_power_limit, c.num_rrh, "rrh_power_limit");
    require_size(c.fronthaul_limit, c.num_rrh, "fronthaul_limit");
    require_size(c.clone_capacity_limit, c.num_ue, "clone_capacity_limit");
    require_size(c.tradeoff, c.num_ue, "tradeoff");
    require_size(c.bandwidth, c.num_ue, "bandwidth");
    require_size(c.cloud_exponent, c.num_ue, "cloud_exponent");
    require_size(c.switched_capacitance, c.num_ue, "switched_capacitance");

    auto positive = [](double x) { return x > 0.0; };
    require_each(c.rrh_power_limit, "rrh_power_limit", positive, "> 0");
    require_each(c.fronthaul_limit, "fronthaul_limit", positive, "> 0");
    require_each(c.clone_capacity_limit, "clone_capacity_limit", positive, "> 0");
    require_each(c.tradeoff, "tradeoff", [](double x) { return x >= 0.0; }, ">= 0");
    require_each(c.bandwidth, "bandwidth", positive, "> 0");
    require_each(c.cloud_exponent, "cloud_exponent", [](double x) { return x >= 1.0; }, ">= 1");
    require_each(c.switched_capacitance, "switched_capacitance", [](double x) { return x >= 0.0; },
                 ">= 0");
    if (!(c.stability_epsilon > 0.0) || !std::isfinite(c.stability_epsilon)) {
        throw ValidationError("stability_epsilon", "must be > 0");
    }
    if (!std::isfinite(c.noise_psd_dbm_hz)) throw ValidationError("noise_psd", "must be finite");

    const Geometry& g = c.geometry;
    if (g.rrh_positions.empty() && !(g.side_km > 0.0)) {
        throw ValidationError("side_km", "must be > 0");
    }
    if (g.min_ue_distance_km < 0.0 || (g.ue_positions.empty() && g.min_ue_distance_km * 2.0 >= g.side_km)) {
        throw ValidationError("min_ue_distance_km", "must be >= 0 and below half the square side");
    }
    if (!g.rrh_positions.empty() && static_cast<int>(g.rrh_positions.size()) != c.num_rrh) {
        throw ValidationError("rrh_positions", "expected num_rrh entries");
    }
    if (!g.ue_positions.empty() && static_cast<int>(g.ue_positions.size()) != c.num_ue) {
        throw ValidationError("ue_positions", "expected num_ue entries");
    }

    if (static_cast<int>(scenario.tasks.size()) != c.num_ue) {
        throw ValidationError("tasks", "expected num_ue tasks, got " + std::to_string(scenario.tasks.size()));
    }
    for (const Task& t : scenario.tasks) {
        if (!(t.cpu_cycles > 0.0) || !std::isfinite(t.cpu_cycles)) throw ValidationError("cpu_cycles", "must be > 0");
        if (!(t.result_bits >= 0.0) || !std::isfinite(t.result_bits)) throw ValidationError("result_bits", "must be >= 0");
        if (!(t.deadline > 0.0) || !std::isfinite(t.deadline)) throw ValidationError("deadline", "must be > 0");
    }
}

Scenario load_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError("document", e.what());
    }
    if (!doc.is_object()) throw ValidationError("document", "top level must be an object");
    reject_unknown(doc, {"name", "system", "tasks", "geometry", "seed"}, "document");

    Scenario s = default_scenario();
    SystemConfig& c = s.system;
    c.rrh_power_limit.clear();
    c.fronthaul_limit.clear();
    c.clone_capacity_limit.clear();
    c.tradeoff.clear();
    c.bandwidth.clear();
    c.cloud_exponent.clear();
    c.switched_capacitance.clear();

    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ValidationError("name", "expected a string");
        c.name = doc["name"].get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
            throw ValidationError("seed", "expected a non-negative integer");
        }
        if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() < 0) {
            throw ValidationError("seed", "expected a non-negative integer");
        }
        c.rng_seed = doc["seed"].get<std::uint64_t>();
    }

    if (doc.contains("system")) {
        const json& sys = doc["system"];
        if (!sys.is_object()) throw ValidationError("system", "expected an object");
        reject_unknown(sys,
                       {"num_rrh", "antennas_per_rrh", "num_ue", "rrh_power_limit", "clone_capacity_limit",
                        "tradeoff", "bandwidth", "fronthaul_limit", "cloud_exponent", "switched_capacitance",
                        "stability_epsilon", "noise_psd"},
                       "system");
        if (sys.contains("num_rrh")) c.num_rrh = read_count(sys["num_rrh"], "num_rrh");
        if (sys.contains("antennas_per_rrh")) c.antennas_per_rrh = read_count(sys["antennas_per_rrh"], "antennas_per_rrh");
        if (sys.contains("num_ue")) c.num_ue = read_count(sys["num_ue"], "num_ue");

        auto vec = [&](const char* key, std::vector<double>& out) {
            if (sys.contains(key)) out = read_numbers(sys[key], key);
        };
        vec("rrh_power_limit", c.rrh_power_limit);
        vec("fronthaul_limit", c.fronthaul_limit);
        vec("clone_capacity_limit", c.clone_capacity_limit);
        vec("tradeoff", c.tradeoff);
        vec("bandwidth", c.bandwidth);
        vec("cloud_exponent", c.cloud_exponent);
        vec("switched_capacitance", c.switched_capacitance);
        if (sys.contains("stability_epsilon")) c.stability_epsilon = read_number(sys["stability_epsilon"], "stability_epsilon");
        if (sys.contains("noise_psd")) c.noise_psd_dbm_hz = read_number(sys["noise_psd"], "noise_psd");
    }
    // Scalars broadcast; arrays keep their length so validate() can reject mismatches.
    auto broadcast_scalar = [](std::vector<double>& v, int n, double fallback) {
        if (v.empty()) v.assign(static_cast<std::size_t>(n), fallback);
        else if (v.size() == 1 && n != 1) v.assign(static_cast<std::size_t>(n), v.front());
    };
    broadcast_scalar(c.rrh_power_limit, c.num_rrh, 1.0);
    broadcast_scalar(c.fronthaul_limit, c.num_rrh, 1e7);
    broadcast_scalar(c.clone_capacity_limit, c.num_ue, 1e6);
    broadcast_scalar(c.tradeoff, c.num_ue, 10.0);
    broadcast_scalar(c.bandwidth, c.num_ue, 1e7);
    broadcast_scalar(c.cloud_exponent, c.num_ue, 3.0);
    broadcast_scalar(c.switched_capacitance, c.num_ue, 1e-11);

    if (doc.contains("geometry")) {
        const json& geo = doc["geometry"];
        if (!geo.is_object()) throw ValidationError("geometry", "expected an object");
        reject_unknown(geo, {"side_km", "min_ue_distance_km", "rrh_positions", "ue_positions"}, "geometry");
        if (geo.contains("side_km")) c.geometry.side_km = read_number(geo["side_km"], "side_km");
        if (geo.contains("min_ue_distance_km")) {
            c.geometry.min_ue_distance_km = read_number(geo["min_ue_distance_km"], "min_ue_distance_km");
        }
        if (geo.contains("rrh_positions")) c.geometry.rrh_positions = read_points(geo["rrh_positions"], "rrh_positions");
        if (geo.contains("ue_positions")) c.geometry.ue_positions = read_points(geo["ue_positions"], "ue_positions");
    }

    s.tasks.clear();
    if (!doc.contains("tasks")) {
        s.tasks.assign(static_cast<std::size_t>(std::max(c.num_ue, 0)), Task{});
    } else if (doc["tasks"].is_array()) {
        for (const auto& t : doc["tasks"]) s.tasks.push_back(read_task(t));
    } else {
        s.tasks.assign(static_cast<std::size_t>(std::max(c.num_ue, 0)), read_task(doc["tasks"]));
    }

    validate(s);
    return s;
}

Scenario load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario s = load_config(buf.str());
    if (s.system.name.empty() || s.system.name == "table1") {
        // Only override the default name; an explicit "name" key wins.
        if (buf.str().find("\"name\"") == std::string::npos) s.system.name = path.stem().string();
    }
    return s;
}

double path_loss_db(double d_km) {
    if (!(d_km > 0.0)) throw DomainError("path_loss_db: distance must be > 0");
    return 127.0 + 25.0 * std::log10(d_km);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double noise_power_w(double psd_dbm_hz, double bandwidth_hz) {
    return db_to_linear(psd_dbm_hz - 30.0) * bandwidth_hz;
}

std::vector<Point> rrh_positions(const SystemConfig& cfg) {
    if (!cfg.geometry.rrh_positions.empty()) return cfg.geometry.rrh_positions;
    const double side = cfg.geometry.side_km;
    const double centre = side / 2.0;
    const double radius = side / std::numbers::sqrt2;
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(cfg.num_rrh));
    if (cfg.num_rrh == 1) {
        out.push_back({0.0, 0.0});
        return out;
    }
    for (int j = 0; j < cfg.num_rrh; ++j) {
        const double angle = -3.0 * std::numbers::pi / 4.0 + 2.0 * std::numbers::pi * j / cfg.num_rrh;
        out.push_back({centre + radius * std::cos(angle), centre + radius * std::sin(angle)});
    }
    return out;
}

std::vector<Point> ue_positions(const SystemConfig& cfg, std::uint64_t seed) {
    if (!cfg.geometry.ue_positions.empty()) return cfg.geometry.ue_positions;
    const auto rrhs = rrh_positions(cfg);
    const double side = cfg.geometry.side_km;
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(cfg.num_ue));
    for (int i = 0; i < cfg.num_ue; ++i) {
        auto rng = stream_rng(seed, kPlacementStream, static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> coord(0.0, side);
        for (int attempt = 0;; ++attempt) {
            if (attempt > 100000) throw DomainError("ue_positions: no room for users outside the RRH exclusion radius");
            Point p{coord(rng), coord(rng)};
            bool clear = true;
            for (const Point& r : rrhs) {
                if (distance_km(p, r) < cfg.geometry.min_ue_distance_km) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                out.push_back(p);
                break;
            }
        }
    }
    return out;
}

ChannelState generate_channels(const SystemConfig& cfg, std::uint64_t seed) {
    ChannelState ch;
    ch.num_ue = cfg.num_ue;
    ch.num_rrh = cfg.num_rrh;
    ch.antennas = cfg.antennas_per_rrh;
    ch.rrh_positions = rrh_positions(cfg);
    ch.ue_positions = ue_positions(cfg, seed);
    ch.gains.resize(ch.antennas, static_cast<Eigen::Index>(ch.num_ue) * ch.num_rrh);
    ch.noise_power.resize(ch.num_ue);

    for (int i = 0; i < ch.num_ue; ++i) {
        ch.noise_power[i] = noise_power_w(cfg.noise_psd_dbm_hz, cfg.bandwidth[static_cast<std::size_t>(i)]);
        auto rng = stream_rng(seed, kFadingStream, static_cast<std::uint64_t>(i));
        std::normal_distribution<double> half(0.0, std::sqrt(0.5));
        for (int j = 0; j < ch.num_rrh; ++j) {
            const double d = distance_km(ch.ue_positions[static_cast<std::size_t>(i)],
                                         ch.rrh_positions[static_cast<std::size_t>(j)]);
            if (!(d > 0.0)) {
                throw DomainError("generate_channels: UE " + std::to_string(i) + " coincides with RRH " +
                                  std::to_string(j));
            }
            const double amplitude = std::sqrt(db_to_linear(-path_loss_db(d)));
            for (int k = 0; k < ch.antennas; ++k) {
                const double re = half(rng);
                const double im = half(rng);
                ch.h(i, j)[k] = amplitude * std::complex<double>(re, im);
            }
        }
    }
    return ch;
}

bool ChannelState::operator==(const ChannelState& other) const {
    auto same_points = [](const std::vector<Point>& a, const std::vector<Point>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t n = 0; n < a.size(); ++n) {
            if (a[n].x_km != b[n].x_km || a[n].y_km != b[n].y_km) return false;
        }
        return true;
    };
    return num_ue == other.num_ue && num_rrh == other.num_rrh && antennas == other.antennas &&
           gains == other.gains && noise_power == other.noise_power &&
           same_points(rrh_positions, other.rrh_positions) && same_points(ue_positions, other.ue_positions);
}

}  // namespace cranmc
