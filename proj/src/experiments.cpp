// SPDX-License-Identifier: Apache-2.0
#include "cranmc/experiments.hpp"

#include "cranmc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifdef CRANMC_HAVE_OPENMP
#include <omp.h>
#endif

namespace cranmc {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) return out;
        s.remove_prefix(pos + 1);
    }
}

double to_double(std::string_view s, const char* field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ValidationError(field, "not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::uint64_t to_u64(std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError("seeds", "not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
}

// %.8g keeps goldens stable against last-bit noise while staying plot-precise.
std::string fmt(double x, const char* spec = "%.8g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

template <class T>
void grow_or_trim(std::vector<T>& v, int n) {
    if (v.empty()) return;
    const T last = v.back();
    v.resize(static_cast<std::size_t>(n), last);
}

struct SweepPoint {
    double value;
    std::size_t method;
    std::size_t seed;
};

std::vector<SweepPoint> points_of(const SweepSpec& spec) {
    std::vector<SweepPoint> pts;
    pts.reserve(spec.grid.size() * spec.methods.size() * spec.seeds.size());
    for (double v : spec.grid)
        for (std::size_t m = 0; m < spec.methods.size(); ++m)
            for (std::size_t s = 0; s < spec.seeds.size(); ++s) pts.push_back({v, m, s});
    return pts;
}

SolutionRecord run_point(const SweepSpec& spec, const SweepPoint& p) {
    SolutionRecord rec;
    try {
        const Scenario sc = apply_sweep_value(spec.base, spec.param, p.value);
        rec = run_single(sc, spec.methods[p.method], spec.seeds[p.seed], spec.options);
    } catch (const std::exception&) {
        rec.scenario = spec.base.system.name;
        rec.seed = spec.seeds[p.seed];
        rec.method = spec.methods[p.method].label();
        rec.status = status::kSolverFailure;
    }
    rec.param = std::string(param_name(spec.param));
    rec.value = p.value;
    return rec;
}

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

double sum_sorted(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return std::accumulate(xs.begin(), xs.end(), 0.0);
}

}  // namespace

Method Method::parse(std::string_view text) {
    text = trim(text);
    if (text == "joint") return {};
    constexpr std::string_view prefix = "separate:";
    if (text.substr(0, prefix.size()) == prefix) {
        const double a = to_double(text.substr(prefix.size()), "method");
        if (!(a > 0.0 && a < 1.0)) throw ValidationError("method", "separate split must lie in (0, 1)");
        return {Kind::Separate, a};
    }
    throw ValidationError("method", "expected joint or separate:<alpha>, got '" + std::string(text) + "'");
}

std::string Method::label() const { return kind == Kind::Joint ? "joint" : "separate:" + fmt(alpha, "%g"); }

SweepParam parse_param(std::string_view text) {
    text = trim(text);
    if (text == "F") return SweepParam::F;
    if (text == "D") return SweepParam::D;
    if (text == "Tmax" || text == "T_max") return SweepParam::Tmax;
    if (text == "N") return SweepParam::N;
    throw ValidationError("param", "expected F, D, Tmax or N");
}

std::string_view param_name(SweepParam p) {
    switch (p) {
        case SweepParam::F: return "F";
        case SweepParam::D: return "D";
        case SweepParam::Tmax: return "Tmax";
        case SweepParam::N: return "N";
    }
    return "?";
}

std::vector<double> parse_grid(std::string_view text) {
    std::vector<double> g;
    for (auto tok : split(text, ',')) g.push_back(to_double(tok, "grid"));
    return g;
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
    text = trim(text);
    const auto dots = text.find("..");
    std::vector<std::uint64_t> out;
    if (dots != std::string_view::npos) {
        const std::uint64_t a = to_u64(trim(text.substr(0, dots)));
        const std::uint64_t b = to_u64(trim(text.substr(dots + 2)));
        if (b < a) throw ValidationError("seeds", "empty range");
        for (std::uint64_t s = a;; ++s) {
            out.push_back(s);
            if (s == b) break;
        }
        return out;
    }
    for (auto tok : split(text, ',')) out.push_back(to_u64(tok));
    return out;
}

Scenario apply_sweep_value(const Scenario& base, SweepParam p, double value) {
    Scenario s = base;
    switch (p) {
        case SweepParam::F:
            for (Task& t : s.tasks) t.cpu_cycles = value;
            break;
        case SweepParam::D:
            for (Task& t : s.tasks) t.result_bits = value;
            break;
        case SweepParam::Tmax:
            for (Task& t : s.tasks) t.deadline = value;
            break;
        case SweepParam::N: {
            if (value != std::round(value) || value < 1.0) throw ValidationError("num_ue", "must be a positive integer");
            const int n = static_cast<int>(value);
            SystemConfig& c = s.system;
            c.num_ue = n;
            // Extra users copy the last one; existing users keep their values.
            grow_or_trim(c.clone_capacity_limit, n);
            grow_or_trim(c.tradeoff, n);
            grow_or_trim(c.bandwidth, n);
            grow_or_trim(c.cloud_exponent, n);
            grow_or_trim(c.switched_capacitance, n);
            grow_or_trim(s.tasks, n);
            break;
        }
    }
    validate(s);
    return s;
}

void SweepSpec::validate() const {
    if (grid.empty()) throw ValidationError("grid", "must not be empty");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) throw ValidationError("grid", "must be strictly increasing");
    }
    if (methods.empty()) throw ValidationError("methods", "must not be empty");
    if (seeds.empty()) throw ValidationError("seeds", "must not be empty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ValidationError("seeds", "must be distinct");
    }
    for (double v : grid) (void)apply_sweep_value(base, param, v);
}

SolutionRecord run_single(const Scenario& scenario, const Method& method, std::uint64_t seed,
                          const AlgorithmOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemConfig& cfg = scenario.system;
    const auto& tasks = scenario.tasks;

    SolutionRecord rec;
    rec.scenario = cfg.name;
    rec.seed = seed;
    rec.method = method.label();

    const ChannelState ch = generate_channels(cfg, seed);
    const RanSolution* ran = nullptr;
    const CloudAllocation* cloud = nullptr;
    const EnergyBreakdown* energy = nullptr;
    std::vector<double> floors(tasks.size(), 0.0);
    JointSolution joint;
    SeparateSolution sep;
    try {
        if (method.kind == Method::Kind::Joint) {
            joint = algorithm2_joint(cfg, tasks, ch, opt);
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                const Task& t = tasks[i];
                if (t.result_bits > 0.0) {
                    floors[i] = t.result_bits / (t.deadline - t.cpu_cycles / cfg.clone_capacity_limit[i]);
                }
            }
            ran = &joint;
            cloud = &joint.cloud;
            energy = &joint.energy;
        } else {
            sep = separate_baseline(cfg, tasks, ch, method.alpha, opt);
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                floors[i] = min_rate_requirement(tasks[i].result_bits, method.alpha * tasks[i].deadline);
            }
            ran = &sep.ran;
            cloud = &sep.cloud;
            energy = &sep.energy;
        }
        rec.status = ran->status;
        rec.iterations = ran->iterations;
    } catch (const InfeasibleError& e) {
        rec.status = e.side() == InfeasibleSide::Cloud ? status::kInfeasibleCloud : status::kInfeasibleRan;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        rec.status = status::kSolverFailure;
    }

    if (ran && ran->has_solution()) {
        rec.rates = ran->rates;
        rec.powers = ran->powers;
        rec.cloud_energy = cloud->exec_energy;
        double members = 0.0;
        for (const auto& c : ran->clusters) members += static_cast<double>(c.size());
        rec.mean_cluster_size = members / static_cast<double>(ran->clusters.size());
        const auto rep = replay_constraints(cfg, tasks, ch, ran->beamformers, floors, cloud->clone_capacity, opt);
        if (!rep.ok(1e-6)) {
            rec.status = status::kConstraintViolation;
        } else if (rec.status == status::kOptimal) {
            rec.energy_total = energy->grand_total;
            rec.energy_cloud = energy->cloud_total;
            rec.energy_tx = energy->transmit_total;
        }
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<SolutionRecord> run_sweep_serial(const SweepSpec& spec) {
    spec.validate();
    const auto pts = points_of(spec);
    std::vector<SolutionRecord> out;
    out.reserve(pts.size());
    for (const SweepPoint& p : pts) out.push_back(run_point(spec, p));
    return out;
}

std::vector<SolutionRecord> run_sweep(const SweepSpec& spec) {
#ifdef CRANMC_HAVE_OPENMP
    spec.validate();
    const auto pts = points_of(spec);
    std::vector<SolutionRecord> out(pts.size());
    const int workers = spec.workers > 0 ? spec.workers : omp_get_max_threads();
    const auto n = static_cast<std::ptrdiff_t>(pts.size());
    // Points differ a lot in cost (infeasible ones return at once), hence dynamic.
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = run_point(spec, pts[static_cast<std::size_t>(k)]);
    }
    return out;
#else
    return run_sweep_serial(spec);
#endif
}

std::string records_to_csv(const std::vector<SolutionRecord>& records, bool timing) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.scenario << ',' << r.seed << ',' << r.method << ',' << r.param << ',' << fmt(r.value) << ','
           << fmt(r.energy_total) << ',' << fmt(r.energy_cloud) << ',' << fmt(r.energy_tx) << ',' << r.iterations
           << ',' << r.status << ',' << (timing ? fmt(r.wall_ms, "%.3f") : std::string()) << '\n';
    }
    return os.str();
}

std::string records_to_json(const std::vector<SolutionRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back({{"scenario", r.scenario},
                       {"seed", r.seed},
                       {"method", r.method},
                       {"param", r.param},
                       {"value", opt_json(r.value)},
                       {"energy_total_j", opt_json(r.energy_total)},
                       {"energy_cloud_j", opt_json(r.energy_cloud)},
                       {"energy_tx_j", opt_json(r.energy_tx)},
                       {"rates_bps", r.rates},
                       {"powers_w", r.powers},
                       {"cloud_energy_j", r.cloud_energy},
                       {"mean_cluster_size", opt_json(r.mean_cluster_size)},
                       {"iterations", r.iterations},
                       {"status", r.status},
                       {"wall_ms", r.wall_ms}});
    }
    return arr.dump(1) + "\n";
}

std::vector<SolutionRecord> records_from_json(std::string_view text) {
    const json arr = json::parse(text);
    if (!arr.is_array()) throw std::invalid_argument("records: expected a JSON array");
    std::vector<SolutionRecord> out;
    for (const auto& j : arr) {
        SolutionRecord r;
        r.scenario = j.at("scenario").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.method = j.at("method").get<std::string>();
        r.param = j.at("param").get<std::string>();
        r.value = opt_from(j, "value");
        r.energy_total = opt_from(j, "energy_total_j");
        r.energy_cloud = opt_from(j, "energy_cloud_j");
        r.energy_tx = opt_from(j, "energy_tx_j");
        r.rates = j.at("rates_bps").get<std::vector<double>>();
        r.powers = j.at("powers_w").get<std::vector<double>>();
        r.cloud_energy = j.at("cloud_energy_j").get<std::vector<double>>();
        r.mean_cluster_size = opt_from(j, "mean_cluster_size");
        r.iterations = j.at("iterations").get<int>();
        r.status = j.at("status").get<std::string>();
        r.wall_ms = j.at("wall_ms").get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<AggregateRow> aggregate(const std::vector<SolutionRecord>& records) {
    struct Acc {
        int runs = 0;
        std::vector<double> total, cloud, tx;
    };
    std::map<std::tuple<std::string, double, std::string>, Acc> groups;
    for (const auto& r : records) {
        Acc& a = groups[{r.param, r.value.value_or(0.0), r.method}];
        ++a.runs;
        if (r.energy_total) {
            a.total.push_back(*r.energy_total);
            a.cloud.push_back(r.energy_cloud.value_or(0.0));
            a.tx.push_back(r.energy_tx.value_or(0.0));
        }
    }
    std::vector<AggregateRow> rows;
    for (const auto& [key, a] : groups) {
        AggregateRow row;
        std::tie(row.param, row.value, row.method) = key;
        row.runs = a.runs;
        row.optimal = static_cast<int>(a.total.size());
        if (row.optimal > 0) {
            const double n = row.optimal;
            row.mean_total = sum_sorted(a.total) / n;
            row.mean_cloud = sum_sorted(a.cloud) / n;
            row.mean_tx = sum_sorted(a.tx) / n;
            std::vector<double> dev;
            for (double x : a.total) dev.push_back((x - row.mean_total) * (x - row.mean_total));
            row.stdev_total = row.optimal > 1 ? std::sqrt(sum_sorted(dev) / (n - 1.0)) : 0.0;
        } else {
            row.mean_total = row.stdev_total = row.mean_cloud = row.mean_tx = std::nan("");
        }
        rows.push_back(row);
    }
    return rows;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream os;
    os << "param,value,method,runs,optimal,mean_energy_total_j,stdev_energy_total_j,mean_energy_cloud_j,"
          "mean_energy_tx_j\n";
    for (const auto& r : rows) {
        auto f = [](double x) { return std::isnan(x) ? std::string() : fmt(x); };
        os << r.param << ',' << fmt(r.value) << ',' << r.method << ',' << r.runs << ',' << r.optimal << ','
           << f(r.mean_total) << ',' << f(r.stdev_total) << ',' << f(r.mean_cloud) << ',' << f(r.mean_tx) << '\n';
    }
    return os.str();
}

void write_records(const std::vector<SolutionRecord>& records, const std::filesystem::path& path, RecordFormat format,
                   bool timing) {
    if (records.empty()) throw std::invalid_argument("no records to write");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (format == RecordFormat::Csv) {
        os << records_to_csv(records, timing);
    } else if (timing) {
        os << records_to_json(records);
    } else {
        auto copy = records;
        for (auto& r : copy) r.wall_ms = 0.0;
        os << records_to_json(copy);
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void emit_records(const std::vector<SolutionRecord>& records, const std::filesystem::path& dir, bool timing) {
    if (records.empty()) throw std::invalid_argument("no records to write");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    write_records(records, dir / "records.csv", RecordFormat::Csv, timing);
    write_records(records, dir / "records.json", RecordFormat::Json, timing);
    std::ofstream os(dir / "aggregate.csv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + (dir / "aggregate.csv").string() + " for writing");
    os << aggregate_to_csv(aggregate(records));
}

}  // namespace cranmc
