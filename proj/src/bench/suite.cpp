#include "transit/bench/bench.hpp"

#include "transit/common/error.hpp"

#include <cmath>
#include <fstream>

namespace transit::bench {

using nlohmann::json;

namespace {

struct Row {
    std::string type;
    const TypeMetrics* m;
};

std::vector<Row> rows_of(const RoundMetrics& r) {
    std::vector<Row> rows;
    for (const auto& [type, m] : r.by_type) rows.push_back({std::string(to_string(type)), &m});
    rows.push_back({"all", &r.overall});
    return rows;
}

struct Stat {
    double mean = 0;
    double stddev = 0;
};

Stat stat(const std::vector<double>& v) {
    Stat s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double sq = 0;
        for (double x : v) sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(v.size() - 1));
    }
    return s;
}

/// (rate, type) -> per-repetition metrics, in rate order.
std::map<double, std::map<std::string, std::vector<const TypeMetrics*>>> cells(const std::vector<RoundMetrics>& rounds) {
    std::map<double, std::map<std::string, std::vector<const TypeMetrics*>>> out;
    for (const auto& r : rounds)
        for (const auto& row : rows_of(r)) out[r.send_rate][row.type].push_back(row.m);
    return out;
}

template <class F>
Stat stat_of(const std::vector<const TypeMetrics*>& ms, F f) {
    std::vector<double> v;
    for (const auto* m : ms) v.push_back(f(*m));
    return stat(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out.precision(6);
    out << std::fixed;
    return out;
}

}  // namespace

void write_rounds_csv(const std::vector<RoundMetrics>& rounds, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "rate,rep,tx_type,throughput,lat_avg,lat_p95,lat_max,conflicts\n";
    for (const auto& r : rounds)
        for (const auto& row : rows_of(r))
            out << r.send_rate << ',' << r.rep << ',' << row.type << ',' << row.m->throughput << ','
                << row.m->latency_avg << ',' << row.m->latency_p95 << ',' << row.m->latency_max << ','
                << row.m->conflict_rate << '\n';
}

void write_summary_csv(const std::vector<RoundMetrics>& rounds, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "rate,tx_type,reps,throughput_mean,throughput_std,lat_avg_mean,lat_avg_std,lat_p95_mean,"
           "lat_max_mean,conflicts_mean\n";
    for (const auto& [rate, types] : cells(rounds))
        for (const auto& [type, ms] : types) {
            auto tp = stat_of(ms, [](const TypeMetrics& m) { return m.throughput; });
            auto la = stat_of(ms, [](const TypeMetrics& m) { return m.latency_avg; });
            auto lp = stat_of(ms, [](const TypeMetrics& m) { return m.latency_p95; });
            auto lm = stat_of(ms, [](const TypeMetrics& m) { return m.latency_max; });
            auto cf = stat_of(ms, [](const TypeMetrics& m) { return m.conflict_rate; });
            out << rate << ',' << type << ',' << ms.size() << ',' << tp.mean << ',' << tp.stddev << ','
                << la.mean << ',' << la.stddev << ',' << lp.mean << ',' << lm.mean << ',' << cf.mean << '\n';
        }
}

json plot_data(const std::vector<RoundMetrics>& rounds) {
    json out = json::object();
    for (const auto& [rate, types] : cells(rounds))
        for (const auto& [type, ms] : types) {
            auto& series = out[type];
            auto tp = stat_of(ms, [](const TypeMetrics& m) { return m.throughput; });
            auto la = stat_of(ms, [](const TypeMetrics& m) { return m.latency_avg; });
            series["send_rate"].push_back(rate);
            series["throughput"].push_back(tp.mean);
            series["throughput_std"].push_back(tp.stddev);
            series["latency"].push_back(la.mean);
            series["latency_std"].push_back(la.stddev);
        }
    return out;
}

SuiteResult run_suite(const WorkloadConfig& config, const std::filesystem::path& out_dir,
                      const std::function<void(const RoundMetrics&)>& on_round) {
    config.validate();
    SuiteResult result;
    for (double rate : config.send_rates)
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            auto workload = generate_workload(config, rate, round_seed(config.seed, rate, rep));
            auto metrics = run_round(workload, config);
            metrics.rep = rep;
            if (on_round) on_round(metrics);
            result.rounds.push_back(std::move(metrics));
        }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_rounds_csv(result.rounds, out_dir / "rounds.csv");
        write_summary_csv(result.rounds, out_dir / "summary.csv");
        auto plot = open_out(out_dir / "plot.json");
        plot << plot_data(result.rounds).dump(2) << '\n';
    }
    return result;
}

}  // namespace transit::bench
