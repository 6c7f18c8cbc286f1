#include "transit/bench/bench.hpp"

#include "transit/common/error.hpp"
#include "transit/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace transit::bench {

using nlohmann::json;

std::string_view to_string(TxType t) noexcept {
    return t == TxType::request_access ? "Request_Access" : "Finish_Trip";
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_argument, "bench config: " + what); }

constexpr Millis kBenchStart = 1709539200000;  // 2024-03-04T08:00Z, a Monday
const access::GeoPoint kOrigin{-33.8688, 151.2093};
const access::GeoPoint kDestination{-33.8915, 151.2767};
const std::vector<std::string> kTransports{"bus", "train"};

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

access::TripRequest draw_trip(std::mt19937_64& rng, const WorkloadConfig& c, std::string id) {
    access::TripRequest t;
    t.trip_id = std::move(id);
    t.employee = employee_id(rng() % c.employees);
    t.company = "transit-co";
    t.transport = kTransports[rng() % kTransports.size()];
    t.origin = kOrigin;
    t.destination = kDestination;
    t.max_cost = 5 + static_cast<std::int64_t>(rng() % 16);
    return t;
}

}  // namespace

void WorkloadConfig::validate() const {
    if (send_rates.empty()) bad("send_rates must not be empty");
    for (std::size_t i = 0; i < send_rates.size(); ++i) {
        if (!(send_rates[i] > 0)) bad("send rates must be positive");
        if (i > 0 && !(send_rates[i] > send_rates[i - 1])) bad("send_rates must be strictly increasing");
    }
    if (tx_per_round == 0) bad("tx_per_round must be positive");
    if (repetitions == 0) bad("repetitions must be positive");
    if (!(mix >= 0 && mix <= 1)) bad("mix must lie in [0, 1]");
    if (!(committer_capacity > 0)) bad("committer_capacity must be positive");
    if (retry_limit < 0) bad("retry_limit must not be negative");
    if (block_size == 0) bad("block_size must be positive");
    if (employees == 0) bad("employees must be positive");
    if (!(cost.validation >= 0 && cost.request_access >= 0 && cost.finish_trip >= 0))
        bad("costs must not be negative");
    if (!(cost.validation + cost.request_access > 0 && cost.validation + cost.finish_trip > 0))
        bad("every transaction type needs a positive cost");
}

double WorkloadConfig::service_seconds(TxType t) const {
    const double mean = mix * cost.request_access + (1 - mix) * cost.finish_trip;
    const double own = t == TxType::request_access ? cost.request_access : cost.finish_trip;
    return (cost.validation + own) / (committer_capacity * (cost.validation + mean));
}

WorkloadConfig config_from_json(const json& j) {
    if (!j.is_object()) bad("expected a JSON object");
    WorkloadConfig c;
    static const std::vector<std::string> known{"send_rates", "tx_per_round", "repetitions", "mix",
                                                "committer_capacity", "retry_limit", "seed", "block_size",
                                                "employees", "layout", "cost"};
    for (const auto& [k, _] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) bad("unknown field '" + k + "'");
    auto uint = [&](const char* k, auto& out) {
        if (!j.contains(k)) return;
        if (!j[k].is_number_unsigned()) bad(std::string(k) + " must be a nonnegative integer");
        out = j[k].get<std::remove_reference_t<decltype(out)>>();
    };
    auto number = [&](const json& o, const char* k, double& out) {
        if (!o.contains(k)) return;
        if (!o[k].is_number()) bad(std::string(k) + " must be a number");
        out = o[k].get<double>();
    };
    if (j.contains("send_rates")) {
        if (!j["send_rates"].is_array()) bad("send_rates must be an array");
        c.send_rates.clear();
        for (const auto& r : j["send_rates"]) {
            if (!r.is_number()) bad("send_rates entries must be numbers");
            c.send_rates.push_back(r.get<double>());
        }
    }
    uint("tx_per_round", c.tx_per_round);
    uint("repetitions", c.repetitions);
    uint("seed", c.seed);
    uint("block_size", c.block_size);
    uint("employees", c.employees);
    if (j.contains("retry_limit")) {
        if (!j["retry_limit"].is_number_integer()) bad("retry_limit must be an integer");
        c.retry_limit = j["retry_limit"].get<int>();
    }
    number(j, "mix", c.mix);
    number(j, "committer_capacity", c.committer_capacity);
    if (j.contains("layout")) {
        const auto l = j["layout"].is_string() ? j["layout"].get<std::string>() : std::string();
        if (l == "phased") c.layout = Layout::phased;
        else if (l == "interleaved") c.layout = Layout::interleaved;
        else bad("layout must be phased or interleaved");
    }
    if (j.contains("cost")) {
        const auto& k = j["cost"];
        if (!k.is_object()) bad("cost must be an object");
        number(k, "validation", c.cost.validation);
        number(k, "request_access", c.cost.request_access);
        number(k, "finish_trip", c.cost.finish_trip);
    }
    c.validate();
    return c;
}

json to_json(const WorkloadConfig& c) {
    return json{{"send_rates", c.send_rates},
                {"tx_per_round", c.tx_per_round},
                {"repetitions", c.repetitions},
                {"mix", c.mix},
                {"committer_capacity", c.committer_capacity},
                {"retry_limit", c.retry_limit},
                {"seed", c.seed},
                {"block_size", c.block_size},
                {"employees", c.employees},
                {"layout", c.layout == Layout::phased ? "phased" : "interleaved"},
                {"cost",
                 {{"validation", c.cost.validation},
                  {"request_access", c.cost.request_access},
                  {"finish_trip", c.cost.finish_trip}}}};
}

WorkloadConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::validation_error, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::string employee_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "emp-%04zu", i);
    return buf;
}

std::uint64_t round_seed(std::uint64_t seed, double rate, std::size_t rep) {
    return mix64(mix64(seed) ^ mix64(static_cast<std::uint64_t>(std::llround(rate * 1000))) ^ (rep + 1));
}

Workload generate_workload(const WorkloadConfig& config, double send_rate, std::uint64_t seed) {
    config.validate();
    if (!(send_rate > 0)) bad("send rate must be positive");
    Workload w;
    w.send_rate = send_rate;
    w.seed = seed;
    std::mt19937_64 rng(seed);

    const auto n = config.tx_per_round;
    const auto requests = static_cast<std::size_t>(std::llround(config.mix * static_cast<double>(n)));
    const auto finishes = n - requests;

    for (std::size_t k = 0; k < finishes; ++k) w.preapproved.push_back(draw_trip(rng, config, "pre-" + std::to_string(k)));

    std::vector<TxType> types(requests, TxType::request_access);
    types.insert(types.end(), finishes, TxType::finish_trip);
    if (config.layout == Layout::interleaved)
        for (std::size_t i = types.size(); i > 1; --i) std::swap(types[i - 1], types[rng() % i]);

    std::size_t next_request = 0, next_finish = 0;
    std::size_t slot[2] = {0, 0};  // per-phase position
    for (auto type : types) {
        WorkItem item;
        item.type = type;
        item.phase = config.layout == Layout::phased && type == TxType::finish_trip ? 1 : 0;
        const auto pos = slot[item.phase]++;
        item.at_us = static_cast<std::int64_t>(std::llround(static_cast<double>(pos) * 1e6 / send_rate));
        if (type == TxType::request_access) {
            auto trip = draw_trip(rng, config, "req-" + std::to_string(next_request++));
            item.submitter = trip.employee;
            item.invocation = {"access", "request_access", json{{"trip", access::to_json(trip)}}};
        } else {
            const auto& trip = w.preapproved[next_finish++];
            const auto actual = trip.max_cost - static_cast<std::int64_t>(rng() % (trip.max_cost / 2 + 1));
            item.submitter = trip.company;
            item.invocation = {"access", "finish_trip", json{{"trip_id", trip.trip_id}, {"actual_cost", actual}}};
        }
        w.stream.push_back(std::move(item));
    }
    std::stable_sort(w.stream.begin(), w.stream.end(),
                     [](const WorkItem& a, const WorkItem& b) { return a.phase < b.phase; });
    return w;
}

std::string serialize(const Workload& w) {
    std::ostringstream out;
    for (const auto& item : w.stream)
        out << json{{"at_us", item.at_us},
                    {"phase", item.phase},
                    {"type", to_string(item.type)},
                    {"submitter", item.submitter},
                    {"invocation", to_json(item.invocation)}}
                   .dump()
            << '\n';
    return out.str();
}

Population setup_population(const WorkloadConfig& config) {
    NetworkOptions options;
    options.ledger.block_size = config.block_size;
    Population pop;
    pop.network = scenario::make_transport_network(options);
    pop.channel = "org-chan";
    pop.organisation = "org";
    pop.company = "transit-co";
    scenario::Driver d(*pop.network, kBenchStart);

    d.register_principal({pop.organisation, PrincipalKind::organisation, std::nullopt, ""});
    d.register_principal({pop.company, PrincipalKind::transport_company, std::nullopt, ""});
    d.register_principal({"ops", PrincipalKind::department, pop.organisation, ""});
    for (std::size_t i = 0; i < config.employees; ++i) {
        pop.employees.push_back(employee_id(i));
        d.register_principal({pop.employees.back(), PrincipalKind::employee, pop.organisation, "staff"});
    }
    d.create_channel(pop.channel, pop.organisation, {pop.company});

    constexpr std::int64_t kCredits = 1'000'000'000;
    const auto admin = pop.network->admin_id();
    d.expect(pop.channel, admin, {"token", "mint", json{{"owner", pop.organisation}, {"amount", 1000}}});
    auto deal = scenario::negotiate(pop.company, pop.organisation, 1000, 1000, kCredits, {{"bus", 2}, {"train", 3}});
    scenario::run_purchase(d, pop.channel, deal.proposal);

    using namespace access;
    d.expect(pop.channel, pop.organisation, {"access", "deploy", json{{"conditions", to_json(Condition::always())}}});
    auto dept = d.expect(pop.channel, pop.organisation,
                         {"access", "delegate",
                          json{{"parent", kRootNode},
                               {"grantee", "ops"},
                               {"conditions", to_json(Condition(TransportTypes{{"bus", "train"}}))}}});
    const auto dept_node = dept.at("node").get<std::string>();
    for (const auto& e : pop.employees)
        d.expect(pop.channel, "ops",
                 {"access", "delegate",
                  json{{"parent", dept_node},
                       {"grantee", e},
                       {"conditions", to_json(Condition(MaxPerTrip{50}))},
                       {"sub_limit", {{"credits", kCredits}, {"period", "month"}}}}});
    pop.clock = d.now();
    return pop;
}

}  // namespace transit::bench
