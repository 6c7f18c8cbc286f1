#pragma once

#include "transit/access/access_contract.hpp"
#include "transit/ledger/network.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace transit::bench {

enum class TxType { request_access, finish_trip };
std::string_view to_string(TxType t) noexcept;  // "Request_Access" / "Finish_Trip"

/// phased: all Request_Access of a round, drain, then all Finish_Trip.
/// interleaved: one stream with both types shuffled together.
enum class Layout { phased, interleaved };

/// Logical execution cost per transaction. A transaction of type T occupies
/// the committer for (validation + cost_T) / (capacity * (validation + mean
/// cost)) seconds, so a stream with the configured mix commits at exactly
/// `committer_capacity` tps.
struct CostModel {
    double validation = 4.0;
    double request_access = 1.3;
    double finish_trip = 1.0;
};

struct WorkloadConfig {
    std::vector<double> send_rates{100, 150, 200, 250, 300};
    std::size_t tx_per_round = 20000;
    std::size_t repetitions = 10;
    double mix = 0.5;  // fraction of Request_Access
    double committer_capacity = 175;
    int retry_limit = 3;
    std::uint64_t seed = 1;
    std::size_t block_size = 50;
    std::size_t employees = 200;
    Layout layout = Layout::phased;
    CostModel cost;

    /// Throws Error(invalid_argument) naming the first bad field.
    void validate() const;
    double service_seconds(TxType t) const;
};

WorkloadConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WorkloadConfig& c);
WorkloadConfig load_config(const std::filesystem::path& path);

struct WorkItem {
    std::int64_t at_us = 0;  // offset from the start of its phase
    int phase = 0;
    TxType type = TxType::request_access;
    std::string submitter;
    Invocation invocation;
};

/// A round's input: trips approved during (unmeasured) setup, which the
/// Finish_Trip transactions close, and the timed stream itself.
struct Workload {
    double send_rate = 0;
    std::uint64_t seed = 0;
    std::vector<access::TripRequest> preapproved;
    std::vector<WorkItem> stream;
};

/// Deterministic in (config, rate, seed).
Workload generate_workload(const WorkloadConfig& config, double send_rate, std::uint64_t seed);
/// JSON lines, one per stream item.
std::string serialize(const Workload& w);

/// Network, channel and delegation tree the benchmark runs against.
struct Population {
    std::unique_ptr<Network> network;
    std::string channel;
    PrincipalId organisation;
    PrincipalId company;
    std::vector<PrincipalId> employees;
    Millis clock = 0;
};

std::string employee_id(std::size_t i);
Population setup_population(const WorkloadConfig& config);

struct TypeMetrics {
    std::size_t submitted = 0;
    std::size_t valid = 0;
    std::size_t failed = 0;     // settled as anything but valid
    std::size_t conflicts = 0;  // mvcc-conflict commits, retried ones included
    double throughput = 0;      // valid tx per second
    double latency_avg = 0;     // seconds
    double latency_p95 = 0;
    double latency_max = 0;
    double conflict_rate = 0;   // conflicts / committed attempts
};

struct RoundMetrics {
    double send_rate = 0;
    std::size_t rep = 0;
    std::map<TxType, TypeMetrics> by_type;
    TypeMetrics overall;
    double duration_s = 0;
    double mean_in_system = 0;  // time-averaged transactions in the system
    double arrival_times_latency = 0;  // send rate x mean latency
    std::size_t blocks = 0;
};

RoundMetrics run_round(const Workload& workload, const WorkloadConfig& config);

struct SuiteResult {
    std::vector<RoundMetrics> rounds;
};

/// Runs every rate x repetition. Writes rounds.csv, summary.csv and plot.json
/// into `out_dir` when it is non-empty.
SuiteResult run_suite(const WorkloadConfig& config, const std::filesystem::path& out_dir = {},
                      const std::function<void(const RoundMetrics&)>& on_round = {});

void write_rounds_csv(const std::vector<RoundMetrics>& rounds, const std::filesystem::path& path);
void write_summary_csv(const std::vector<RoundMetrics>& rounds, const std::filesystem::path& path);
nlohmann::json plot_data(const std::vector<RoundMetrics>& rounds);

std::uint64_t round_seed(std::uint64_t seed, double rate, std::size_t rep);

}  // namespace transit::bench
