#include <doctest.h>

#include "support/support.hpp"
#include "transit/bench/bench.hpp"

#include <fstream>
#include <sstream>

using namespace transit;
using namespace transit::bench;
using namespace transit::testing;

namespace {

WorkloadConfig small(std::size_t n = 1000) {
    WorkloadConfig c;
    c.tx_per_round = n;
    c.repetitions = 1;
    c.employees = 50;
    return c;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("default configuration") {
    WorkloadConfig c;
    CHECK(c.send_rates == std::vector<double>{100, 150, 200, 250, 300});
    CHECK(c.tx_per_round == 20000);
    CHECK(c.repetitions == 10);
    CHECK(c.committer_capacity == 175);
    CHECK(c.retry_limit == 3);
    c.validate();
    // The weighted mean service time is exactly 1 / capacity.
    const double mean = c.mix * c.service_seconds(TxType::request_access) +
                        (1 - c.mix) * c.service_seconds(TxType::finish_trip);
    CHECK(mean == doctest::Approx(1.0 / 175));
    CHECK(c.service_seconds(TxType::request_access) > c.service_seconds(TxType::finish_trip));
}

TEST_CASE("invalid configurations") {
    auto rejects = [](auto mutate) {
        WorkloadConfig c;
        mutate(c);
        try {
            c.validate();
        } catch (const Error& e) {
            return e.code() == Errc::invalid_argument;
        }
        return false;
    };
    CHECK(rejects([](WorkloadConfig& c) { c.send_rates = {100, 100}; }));
    CHECK(rejects([](WorkloadConfig& c) { c.send_rates = {200, 100}; }));
    CHECK(rejects([](WorkloadConfig& c) { c.send_rates = {}; }));
    CHECK(rejects([](WorkloadConfig& c) { c.mix = 1.5; }));
    CHECK(rejects([](WorkloadConfig& c) { c.mix = -0.1; }));
    CHECK(rejects([](WorkloadConfig& c) { c.committer_capacity = 0; }));
    CHECK(rejects([](WorkloadConfig& c) { c.tx_per_round = 0; }));
    CHECK(rejects([](WorkloadConfig& c) { c.retry_limit = -1; }));
    CHECK_THROWS_AS(config_from_json(json{{"send_rate", {100}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"mix", "half"}}), Error);
}

TEST_CASE("config json round trip") {
    auto c = small(123);
    c.layout = Layout::interleaved;
    c.mix = 0.25;
    auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    auto partial = config_from_json(json{{"send_rates", {120, 240}}});
    CHECK(partial.send_rates == std::vector<double>{120, 240});
    CHECK(partial.tx_per_round == 20000);
}

TEST_CASE("send rate fixes the inter-submit gap") {
    auto c = small(1000);
    auto w = generate_workload(c, 100, 1);
    REQUIRE(w.stream.size() == 1000);
    std::map<int, std::vector<std::int64_t>> by_phase;
    for (const auto& item : w.stream) by_phase[item.phase].push_back(item.at_us);
    for (const auto& [phase, times] : by_phase) {
        CHECK(times.front() == 0);
        for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] - times[i - 1] == 10'000);
    }
}

TEST_CASE("mix splits the stream") {
    for (std::size_t n : {1000, 1001, 7}) {
        auto c = small(n);
        auto w = generate_workload(c, 150, 2);
        std::size_t req = 0, fin = 0;
        for (const auto& item : w.stream) (item.type == TxType::request_access ? req : fin)++;
        CHECK(req + fin == n);
        CHECK(std::abs(static_cast<long>(req) - static_cast<long>(fin)) <= 1);
        CHECK(w.preapproved.size() == fin);
    }
    auto c = small(100);
    c.mix = 1.0;
    auto w = generate_workload(c, 100, 1);
    CHECK(std::all_of(w.stream.begin(), w.stream.end(),
                      [](const WorkItem& i) { return i.type == TxType::request_access; }));
}

TEST_CASE("workloads are deterministic in the seed") {
    auto c = small(500);
    CHECK(serialize(generate_workload(c, 200, 9)) == serialize(generate_workload(c, 200, 9)));
    CHECK(serialize(generate_workload(c, 200, 9)) != serialize(generate_workload(c, 200, 10)));
    CHECK(round_seed(1, 100, 0) == round_seed(1, 100, 0));
    CHECK(round_seed(1, 100, 0) != round_seed(1, 100, 1));
    CHECK(round_seed(1, 100, 0) != round_seed(1, 150, 0));
    auto line = serialize(generate_workload(small(1), 100, 1));
    auto j = json::parse(line.substr(0, line.find('\n')));
    CHECK(j.contains("at_us"));
    CHECK(j.contains("invocation"));
}

TEST_CASE("below capacity throughput tracks the send rate") {
    auto c = small(1000);
    auto r = run_round(generate_workload(c, 100, 1), c);
    CHECK(r.overall.throughput == doctest::Approx(100).epsilon(0.05));
    CHECK(r.overall.valid == 1000);
    CHECK(r.overall.failed == 0);
    const double block_interval = c.block_size / c.committer_capacity;
    CHECK(r.overall.latency_avg < block_interval);
    CHECK(r.overall.latency_max < 0.5);
    for (const auto& [type, m] : r.by_type) {
        CHECK(m.throughput <= 100 * 1.05);
        CHECK(m.latency_avg >= 0);
        CHECK(m.latency_p95 >= m.latency_avg * 0.5);
        CHECK(m.latency_max >= m.latency_p95);
    }
}

TEST_CASE("above capacity throughput plateaus and latency grows with the backlog") {
    auto c = small(1000);
    auto r1 = run_round(generate_workload(c, 300, 1), c);
    CHECK(r1.overall.throughput == doctest::Approx(175).epsilon(0.05));
    CHECK(r1.overall.throughput <= c.committer_capacity * 1.0001);
    auto c2 = small(2000);
    auto r2 = run_round(generate_workload(c2, 300, 1), c2);
    CHECK(r2.overall.latency_avg > r1.overall.latency_avg * 1.5);
    CHECK(r2.overall.latency_max > r1.overall.latency_max * 1.5);
    CHECK(r1.by_type[TxType::request_access].throughput < r1.by_type[TxType::finish_trip].throughput);
}

TEST_CASE("at exactly capacity the queue stays bounded") {
    auto c = small(4000);
    c.layout = Layout::interleaved;
    auto r = run_round(generate_workload(c, 175, 3), c);
    CHECK(r.overall.throughput == doctest::Approx(175).epsilon(0.05));
    CHECK(r.overall.latency_max < c.block_size / c.committer_capacity);
}

TEST_CASE("little's law on a stable round") {
    auto c = small(2000);
    auto r = run_round(generate_workload(c, 100, 4), c);
    CHECK(r.mean_in_system == doctest::Approx(r.arrival_times_latency).epsilon(0.05));
}

TEST_CASE("round metrics are deterministic") {
    auto c = small(600);
    auto a = run_round(generate_workload(c, 250, 5), c);
    auto b = run_round(generate_workload(c, 250, 5), c);
    CHECK(a.overall.throughput == b.overall.throughput);
    CHECK(a.overall.latency_avg == b.overall.latency_avg);
    CHECK(a.blocks == b.blocks);
}

TEST_CASE("suite with a single rate and repetition") {
    auto c = small(400);
    c.send_rates = {150};
    auto dir = temp_dir("bench-one");
    std::size_t seen = 0;
    auto res = run_suite(c, dir, [&](const RoundMetrics&) { ++seen; });
    CHECK(res.rounds.size() == 1);
    CHECK(seen == 1);

    auto rounds = lines_of(dir / "rounds.csv");
    REQUIRE(rounds.size() == 4);
    CHECK(rounds[0] == "rate,rep,tx_type,throughput,lat_avg,lat_p95,lat_max,conflicts");
    auto summary = lines_of(dir / "summary.csv");
    REQUIRE(summary.size() == 4);
    CHECK(summary[0] ==
          "rate,tx_type,reps,throughput_mean,throughput_std,lat_avg_mean,lat_avg_std,lat_p95_mean,lat_max_mean,"
          "conflicts_mean");
    std::ifstream pin(dir / "plot.json");
    auto plot = json::parse(pin);
    CHECK(plot.contains("Request_Access"));
    CHECK(plot.at("Finish_Trip").at("send_rate") == json::array({150.0}));
    std::filesystem::remove_all(dir);
}

TEST_CASE("default suite size") {
    WorkloadConfig c;
    CHECK(c.send_rates.size() * c.repetitions == 50);
}

}
