#pragma once

#include "transit/access/access_contract.hpp"
#include "transit/ledger/block_log.hpp"
#include "transit/ledger/gateway.hpp"
#include "transit/scenario/scenario.hpp"
#include "transit/token/token_contract.hpp"

#include <charconv>
#include <filesystem>
#include <random>

#include <unistd.h>

namespace transit::testing {

using nlohmann::json;

/// Key-value contract used only by ledger tests.
///   put {key, value}          blind write
///   get {key}                 versioned read
///   transfer {from, to, amount}  read-modify-write of two integer keys
///   add {key, amount[, min, max]} counter delta
///   spend {key, amount}       observe counter, fail below zero, then add
///   note {key, value}         read, write and emit "noted"
///   fail {}                   throws
class KvContract final : public Contract {
public:
    std::string_view name() const override { return "kv"; }
    json invoke(TxContext& ctx, std::string_view op, const json& a) const override {
        auto as_int = [](const std::optional<std::string>& v) -> std::int64_t {
            if (!v) return 0;
            std::int64_t x = 0;
            std::from_chars(v->data(), v->data() + v->size(), x);
            return x;
        };
        if (op == "put") {
            ctx.put(a.at("key").get<std::string>(), a.at("value").get<std::string>());
            return nullptr;
        }
        if (op == "get") {
            auto v = ctx.get(a.at("key").get<std::string>());
            return v ? json(*v) : json(nullptr);
        }
        if (op == "transfer") {
            const auto from = a.at("from").get<std::string>(), to = a.at("to").get<std::string>();
            const auto amount = a.at("amount").get<std::int64_t>();
            const auto f = as_int(ctx.get(from));
            if (f < amount) throw ContractError("insufficient", from);
            const auto t = as_int(ctx.get(to));
            ctx.put(from, std::to_string(f - amount));
            ctx.put(to, std::to_string(t + amount));
            return f - amount;
        }
        if (op == "add") {
            std::optional<std::int64_t> lo, hi;
            if (a.contains("min")) lo = a["min"].get<std::int64_t>();
            if (a.contains("max")) hi = a["max"].get<std::int64_t>();
            ctx.add(a.at("key").get<std::string>(), a.at("amount").get<std::int64_t>(), lo, hi);
            return nullptr;
        }
        if (op == "spend") {
            const auto key = a.at("key").get<std::string>();
            const auto amount = a.at("amount").get<std::int64_t>();
            if (ctx.counter(key) < amount) return "denied";
            ctx.add(key, -amount, 0);
            return "spent";
        }
        if (op == "note") {
            const auto key = a.at("key").get<std::string>();
            const auto prev = ctx.get(key);
            ctx.put(key, a.at("value").get<std::string>());
            ctx.emit("noted", json{{"key", key}, {"previous", prev ? json(*prev) : json(nullptr)}});
            return nullptr;
        }
        if (op == "fail") throw ContractError("boom", "requested failure");
        throw ContractError("unknown-operation", std::string(op));
    }
};

inline ContractSet kv_contracts() {
    ContractSet set;
    set.emplace("kv", std::make_shared<KvContract>());
    return set;
}

/// A directory with one organisation, one company and two members.
inline void populate(Directory& dir) {
    dir.add({"admin", PrincipalKind::network_admin, std::nullopt, ""});
    dir.add({"orgA", PrincipalKind::organisation, std::nullopt, ""});
    dir.add({"companyX", PrincipalKind::transport_company, std::nullopt, ""});
    dir.add({"alice", PrincipalKind::employee, std::string("orgA"), "engineer"});
    dir.add({"bob", PrincipalKind::employee, std::string("orgA"), "sales"});
    dir.add({"orgB", PrincipalKind::organisation, std::nullopt, ""});
    dir.add({"mallory", PrincipalKind::employee, std::string("orgB"), "engineer"});
}

inline ChannelConfig kv_config() { return {"kvchan", "orgA", {"companyX"}}; }

inline Invocation kv(std::string op, json args = json::object()) {
    return {"kv", std::move(op), std::move(args)};
}

/// Tuesday 2024-03-05 09:00 UTC.
inline Millis tuesday_morning() { return parse_timestamp("2024-03-05T09:00Z"); }

inline std::map<std::string, std::string> values_of(const WorldState& s) {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : s.entries()) out.emplace(k, v.value);
    return out;
}

/// One organisation, one company, one department and `employees` employees on
/// "orgA-chan", with credits bought and the access contract deployed.
struct Org {
    std::unique_ptr<Network> net;
    std::unique_ptr<scenario::Driver> d;
    std::string ch = "orgA-chan";
    std::vector<PrincipalId> employees;

    Channel& channel() { return net->channel(ch); }
    token::Ledgerbook book() { return token::read_ledgerbook(channel().snapshot()); }
    token::Balance balance() {
        auto b = book().balances["companyX"];
        return b;
    }
    json run(const PrincipalId& who, std::string contract, std::string op, json args) {
        return d->expect(ch, who, {std::move(contract), std::move(op), std::move(args)});
    }
    TransactionRecord exec(const PrincipalId& who, std::string contract, std::string op, json args) {
        return d->execute(ch, who, {std::move(contract), std::move(op), std::move(args)});
    }
    std::string delegate(const PrincipalId& as, const std::string& parent, const PrincipalId& grantee,
                         const access::Condition& c = access::Condition::always(),
                         std::optional<access::SubLimit> limit = {}) {
        json args{{"parent", parent}, {"grantee", grantee}, {"conditions", access::to_json(c)}};
        if (limit) args["sub_limit"] = {{"credits", limit->credits}, {"period", to_string(limit->period)}};
        return run(as, "access", "delegate", args).at("node").get<std::string>();
    }
    access::Decision request(const access::TripRequest& t, const PrincipalId& as = {}) {
        auto tx = exec(as.empty() ? t.employee : as, "access", "request_access", json{{"trip", access::to_json(t)}});
        if (tx.validity != Validity::valid) return {false, tx.error.empty() ? "mvcc-conflict" : tx.error, {}, {}};
        return access::Decision::from_json(tx.result);
    }
};

struct OrgOptions {
    std::size_t employees = 3;
    std::int64_t credits = 1000;
    std::int64_t price = 500;
    std::int64_t funding = 800;
    std::map<std::string, std::int64_t> prices{{"bus", 5}, {"train", 8}, {"taxi", 20}};
    std::size_t block_size = 50;
    bool purchase = true;
    bool deploy_access = true;
};

inline Org make_org(const OrgOptions& o = {}) {
    Org org;
    NetworkOptions options;
    options.ledger.block_size = o.block_size;
    org.net = scenario::make_transport_network(options);
    org.d = std::make_unique<scenario::Driver>(*org.net, tuesday_morning());
    auto& d = *org.d;
    d.register_principal({"orgA", PrincipalKind::organisation, std::nullopt, ""});
    d.register_principal({"orgB", PrincipalKind::organisation, std::nullopt, ""});
    d.register_principal({"companyX", PrincipalKind::transport_company, std::nullopt, ""});
    d.register_principal({"engA", PrincipalKind::department, std::string("orgA"), ""});
    d.register_principal({"outsider", PrincipalKind::employee, std::string("orgB"), "engineer"});
    for (std::size_t i = 1; i <= o.employees; ++i) {
        org.employees.push_back("e" + std::to_string(i));
        d.register_principal({org.employees.back(), PrincipalKind::employee, std::string("orgA"),
                              i % 2 ? "engineer" : "manager"});
    }
    d.create_channel(org.ch, "orgA", {"companyX"});
    org.run("admin", "token", "mint", json{{"owner", "orgA"}, {"amount", o.funding}});
    if (o.purchase) {
        auto deal = scenario::negotiate("companyX", "orgA", o.price, o.price, o.credits, o.prices);
        scenario::run_purchase(d, org.ch, deal.proposal);
    }
    if (o.deploy_access) org.run("orgA", "access", "deploy", json{{"conditions", access::to_json(access::Condition::always())}});
    return org;
}

inline access::TripRequest trip(std::string id, std::string employee, std::string transport, std::int64_t max_cost) {
    access::TripRequest t;
    t.trip_id = std::move(id);
    t.employee = std::move(employee);
    t.company = "companyX";
    t.transport = std::move(transport);
    t.origin = {-33.8688, 151.2093};
    t.destination = {-33.8731, 151.2060};
    t.max_cost = max_cost;
    return t;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("transit-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace transit::testing
