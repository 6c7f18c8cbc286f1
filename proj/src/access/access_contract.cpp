#include "transit/access/access_contract.hpp"

#include "transit/ledger/args.hpp"
#include "transit/token/token_contract.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace transit::access {

using nlohmann::json;

namespace {

json point_json(GeoPoint p) { return json::array({p.lat, p.lon}); }

GeoPoint point_arg(const json& j, const char* name) {
    const auto& v = args::required(j, name);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ContractError("invalid-trip", std::string(name) + " must be [lat, lon]");
    GeoPoint p{v[0].get<double>(), v[1].get<double>()};
    if (std::abs(p.lat) > 90 || std::abs(p.lon) > 180)
        throw ContractError("invalid-trip", std::string(name) + " out of range");
    return p;
}

std::string node_key(std::string_view id) { return "node/" + std::string(id); }
std::string trip_key(std::string_view id) { return "trip/" + std::string(id); }
std::string grantee_key(std::string_view id) { return "grantee/" + std::string(id); }
std::string usage_key(std::string_view node, std::string_view period) {
    return "usage/" + std::string(node) + "/" + std::string(period);
}
std::string spent_key(std::string_view node, std::string_view period) {
    return "spent/" + std::string(node) + "/" + std::string(period);
}

Condition conditions_arg(const json& a) {
    if (!a.contains("conditions") || a["conditions"].is_null()) return Condition::always();
    try {
        return condition_from_json(a["conditions"]);
    } catch (const Error& e) {
        throw ContractError("bad-argument", e.what());
    }
}

std::optional<SubLimit> sub_limit_arg(const json& a) {
    if (!a.contains("sub_limit") || a["sub_limit"].is_null()) return std::nullopt;
    const auto& s = a["sub_limit"];
    SubLimit out;
    out.credits = args::nonneg(s, "credits");
    try {
        out.period = parse_period(args::str(s, "period"));
    } catch (const Error& e) {
        throw ContractError("bad-argument", e.what());
    }
    return out;
}

struct Meta {
    PrincipalId organisation;
    std::int64_t next_node = 1;
};

std::optional<Meta> load_meta(TxContext& ctx) {
    auto raw = ctx.get("meta");
    if (!raw) return std::nullopt;
    auto j = json::parse(*raw);
    return Meta{j.at("organisation").get<std::string>(), j.at("next_node").get<std::int64_t>()};
}

void store_meta(TxContext& ctx, const Meta& m) {
    ctx.put("meta", json{{"organisation", m.organisation}, {"next_node", m.next_node}}.dump());
}

Meta require_meta(TxContext& ctx) {
    auto m = load_meta(ctx);
    if (!m) throw ContractError("not-deployed", "access contract has no root");
    return *m;
}

std::optional<DelegationNode> find_node(TxContext& ctx, std::string_view id) {
    auto raw = ctx.get(node_key(id));
    if (!raw) return std::nullopt;
    return node_from_json(json::parse(*raw));
}

DelegationNode load_node(TxContext& ctx, std::string_view id) {
    auto n = find_node(ctx, id);
    if (!n) throw ContractError("unknown-node", std::string(id));
    return *n;
}

void store_node(TxContext& ctx, const DelegationNode& n) { ctx.put(node_key(n.id), to_json(n).dump()); }

std::vector<NodeId> grantee_nodes(TxContext& ctx, std::string_view grantee) {
    auto raw = ctx.get(grantee_key(grantee));
    if (!raw) return {};
    return json::parse(*raw).get<std::vector<NodeId>>();
}

/// Root first.
std::vector<DelegationNode> path_to(TxContext& ctx, const DelegationNode& leaf) {
    std::vector<DelegationNode> path{leaf};
    while (path.back().parent) path.push_back(load_node(ctx, *path.back().parent));
    std::reverse(path.begin(), path.end());
    return path;
}

/// Tightest bound per period for one node, from its sub-limit and any
/// BudgetPerPeriod leaves it added.
std::map<Period, std::int64_t> node_bounds(const DelegationNode& n) {
    std::map<Period, std::int64_t> out;
    auto tighten = [&](Period p, std::int64_t c) {
        auto [it, fresh] = out.try_emplace(p, c);
        if (!fresh) it->second = std::min(it->second, c);
    };
    if (n.sub_limit) tighten(n.sub_limit->period, n.sub_limit->credits);
    std::vector<BudgetPerPeriod> budgets;
    collect_budgets(n.added, budgets);
    for (const auto& b : budgets) tighten(b.period, b.credits);
    return out;
}

struct Bound {
    Charge charge;
    std::int64_t limit;
};

std::vector<Bound> path_bounds(const std::vector<DelegationNode>& path, Millis now) {
    std::vector<Bound> out;
    for (const auto& n : path)
        for (const auto& [period, limit] : node_bounds(n))
            out.push_back({Charge{n.id, period_key(period, now)}, limit});
    return out;
}

json denied(std::string reason, std::string detail = {}) {
    json j{{"decision", "denied"}, {"reason", std::move(reason)}};
    if (!detail.empty()) j["detail"] = std::move(detail);
    return j;
}

bool is_channel_company(const TxContext& ctx, std::string_view id) {
    const auto& cs = ctx.channel().companies;
    return std::find(cs.begin(), cs.end(), id) != cs.end();
}

json request_access(TxContext& ctx, const json& a) {
    require_meta(ctx);
    const auto trip = trip_from_json(args::required(a, "trip"));
    const auto& caller = ctx.submitter();
    if (caller.id != trip.employee && caller.id != trip.company)
        throw ContractError("not-authorized", caller.id + " may not request for " + trip.employee);
    if (!is_channel_company(ctx, trip.company))
        throw ContractError("invalid-trip", trip.company + " is not a transport company on this channel");
    const auto employee = ctx.directory().find(trip.employee);
    if (!employee) throw ContractError("invalid-trip", "unknown employee " + trip.employee);
    // The transport type must be priced by the company; throws unknown-transport.
    ctx.call("token", "price_of", json{{"company", trip.company}, {"transport", trip.transport}});

    if (ctx.get(trip_key(trip.trip_id))) return denied("duplicate-trip", trip.trip_id);

    std::vector<DelegationNode> candidates;
    for (const auto& id : grantee_nodes(ctx, trip.employee)) candidates.push_back(load_node(ctx, id));
    if (candidates.empty()) return denied("no-delegation", trip.employee);
    std::erase_if(candidates, [](const DelegationNode& n) { return n.revoked; });
    if (candidates.empty()) return denied("revoked", trip.employee);

    // Balance first, then the rules.
    const auto pool = ctx.call("token", "available", json{{"company", trip.company}})
                          .at("pool_available")
                          .get<std::int64_t>();
    if (pool < trip.max_cost) return denied("insufficient-pool", trip.company);

    const TripContext tctx{ctx.now(), trip.origin, trip.destination, trip.transport, employee->role,
                           trip.max_cost};
    std::optional<json> first_denial;
    for (const auto& node : candidates) {
        const auto path = path_to(ctx, node);
        std::vector<const Condition*> conds;
        for (const auto& n : path) conds.push_back(&n.added);
        if (auto v = evaluate_path(conds, tctx); !v) {
            if (!first_denial) first_denial = denied("condition-failed:" + v.failed, node.id);
            continue;
        }
        const auto bounds = path_bounds(path, ctx.now());
        bool within = true;
        for (const auto& b : bounds)
            if (ctx.counter(usage_key(b.charge.node, b.charge.period_key)) + trip.max_cost > b.limit) {
                within = false;
                break;
            }
        if (!within) {
            if (!first_denial) first_denial = denied("budget-exceeded", node.id);
            continue;
        }

        auto hold = ctx.call("token", "hold",
                             json{{"company", trip.company},
                                  {"trip_id", trip.trip_id},
                                  {"employee", trip.employee},
                                  {"max", trip.max_cost}});
        TripRecord rec;
        rec.trip = trip;
        rec.hold_id = hold.at("hold_id").get<std::string>();
        rec.node = node.id;
        rec.requested_at = ctx.now();
        for (const auto& b : bounds) {
            ctx.add(usage_key(b.charge.node, b.charge.period_key), trip.max_cost, 0, b.limit);
            rec.charges.push_back(b.charge);
        }
        ctx.put(trip_key(trip.trip_id), to_json(rec).dump());
        ctx.emit("trip-approved", json{{"trip_id", trip.trip_id},
                                       {"employee", trip.employee},
                                       {"company", trip.company},
                                       {"hold_id", rec.hold_id},
                                       {"max_cost", trip.max_cost},
                                       {"notify", json::array({trip.company})}});
        return Decision{true, "approved", rec.hold_id, node.id}.to_json();
    }
    return *first_denial;
}

json finish_trip(TxContext& ctx, const json& a) {
    const auto trip_id = args::str(a, "trip_id");
    const auto actual = args::nonneg(a, "actual_cost");
    const auto& caller = ctx.submitter();
    if (caller.kind != PrincipalKind::transport_company || !is_channel_company(ctx, caller.id))
        throw ContractError("wrong-caller", caller.id);
    auto raw = ctx.get(trip_key(trip_id));
    if (!raw) throw ContractError("unknown-trip", trip_id);
    auto rec = trip_record_from_json(json::parse(*raw));
    if (rec.trip.company != caller.id) throw ContractError("wrong-caller", caller.id);
    if (rec.status == TripStatus::finished) throw ContractError("already-finished", trip_id);
    if (actual > rec.trip.max_cost)
        throw ContractError("over-hold-amount",
                            std::to_string(actual) + " > " + std::to_string(rec.trip.max_cost));

    ctx.call("token", "settle", json{{"hold_id", rec.hold_id}, {"actual", actual}});
    for (const auto& c : rec.charges) {
        ctx.add(usage_key(c.node, c.period_key), actual - rec.trip.max_cost, 0);
        ctx.add(spent_key(c.node, c.period_key), actual);
    }
    rec.status = TripStatus::finished;
    rec.actual_cost = actual;
    ctx.put(trip_key(trip_id), to_json(rec).dump());
    return to_json(rec);
}

}  // namespace

json to_json(const DelegationNode& n) {
    json j{{"id", n.id},
           {"grantor", n.grantor},
           {"grantee", n.grantee},
           {"parent", n.parent ? json(*n.parent) : json(nullptr)},
           {"added", to_json(n.added)},
           {"revoked", n.revoked},
           {"children", n.children}};
    j["sub_limit"] = n.sub_limit ? json{{"credits", n.sub_limit->credits},
                                        {"period", to_string(n.sub_limit->period)}}
                                 : json(nullptr);
    return j;
}

DelegationNode node_from_json(const json& j) {
    DelegationNode n;
    n.id = j.at("id").get<std::string>();
    n.grantor = j.at("grantor").get<std::string>();
    n.grantee = j.at("grantee").get<std::string>();
    if (!j.at("parent").is_null()) n.parent = j["parent"].get<std::string>();
    n.added = condition_from_json(j.at("added"));
    if (!j.at("sub_limit").is_null())
        n.sub_limit = SubLimit{j["sub_limit"].at("credits").get<std::int64_t>(),
                               parse_period(j["sub_limit"].at("period").get<std::string>())};
    n.revoked = j.at("revoked").get<bool>();
    n.children = j.at("children").get<std::vector<NodeId>>();
    return n;
}

json to_json(const TripRequest& t) {
    return json{{"trip_id", t.trip_id},           {"employee", t.employee},
                {"company", t.company},           {"transport", t.transport},
                {"origin", point_json(t.origin)}, {"destination", point_json(t.destination)},
                {"max_cost", t.max_cost}};
}

TripRequest trip_from_json(const json& j) {
    TripRequest t;
    try {
        t.trip_id = args::str(j, "trip_id");
        t.employee = args::str(j, "employee");
        t.company = args::str(j, "company");
        t.transport = args::str(j, "transport");
        t.max_cost = args::integer(j, "max_cost");
    } catch (const ContractError& e) {
        throw ContractError("invalid-trip", e.what());
    }
    t.origin = point_arg(j, "origin");
    t.destination = point_arg(j, "destination");
    if (t.max_cost <= 0) throw ContractError("invalid-trip", "max_cost must be positive");
    return t;
}

std::string_view to_string(TripStatus s) noexcept {
    return s == TripStatus::approved ? "approved" : "finished";
}

json to_json(const TripRecord& r) {
    json charges = json::array();
    for (const auto& c : r.charges) charges.push_back({{"node", c.node}, {"period", c.period_key}});
    return json{{"trip", to_json(r.trip)},
                {"status", to_string(r.status)},
                {"hold_id", r.hold_id},
                {"node", r.node},
                {"requested_at", r.requested_at},
                {"charges", charges},
                {"actual_cost", r.actual_cost ? json(*r.actual_cost) : json(nullptr)}};
}

TripRecord trip_record_from_json(const json& j) {
    TripRecord r;
    r.trip = trip_from_json(j.at("trip"));
    const auto status = j.at("status").get<std::string>();
    r.status = status == "finished" ? TripStatus::finished : TripStatus::approved;
    r.hold_id = j.at("hold_id").get<std::string>();
    r.node = j.at("node").get<std::string>();
    r.requested_at = j.at("requested_at").get<Millis>();
    for (const auto& c : j.at("charges"))
        r.charges.push_back({c.at("node").get<std::string>(), c.at("period").get<std::string>()});
    if (!j.at("actual_cost").is_null()) r.actual_cost = j["actual_cost"].get<std::int64_t>();
    return r;
}

Decision Decision::from_json(const json& j) {
    Decision d;
    d.approved = j.at("decision").get<std::string>() == "approved";
    d.reason = j.at("reason").get<std::string>();
    if (j.contains("hold_id")) d.hold_id = j["hold_id"].get<std::string>();
    if (j.contains("node")) d.node = j["node"].get<std::string>();
    return d;
}

json Decision::to_json() const {
    json j{{"decision", approved ? "approved" : "denied"}, {"reason", reason}};
    if (approved) {
        j["hold_id"] = hold_id;
        j["node"] = node;
    }
    return j;
}

Verdict approved_by_rules(const std::vector<DelegationNode>& path, const TripContext& ctx) {
    std::vector<const Condition*> conds;
    for (const auto& n : path) conds.push_back(&n.added);
    if (auto v = evaluate_path(conds, ctx); !v) return v;
    for (const auto& n : path)
        if (n.sub_limit && ctx.amount > n.sub_limit->credits) return {false, "SubLimit"};
    return {};
}

namespace keys {
std::string node(std::string_view id) { return "access/node/" + std::string(id); }
std::string trip(std::string_view trip_id) { return "access/trip/" + std::string(trip_id); }
std::string usage(std::string_view node, std::string_view period_key) {
    return "access/" + usage_key(node, period_key);
}
std::string spent(std::string_view node, std::string_view period_key) {
    return "access/" + spent_key(node, period_key);
}
}  // namespace keys

json AccessContract::invoke(TxContext& ctx, std::string_view op, const json& a) const {
    const auto& caller = ctx.submitter();

    if (op == "deploy") {
        if (caller.id != ctx.channel().organisation) throw ContractError("wrong-caller", caller.id);
        if (load_meta(ctx)) throw ContractError("already-deployed", ctx.channel().name);
        DelegationNode root;
        root.id = std::string(kRootNode);
        root.grantor = root.grantee = caller.id;
        root.added = conditions_arg(a);
        store_node(ctx, root);
        ctx.put(grantee_key(caller.id), json::array({root.id}).dump());
        store_meta(ctx, Meta{caller.id, 1});
        return json{{"node", root.id}};
    }

    if (op == "delegate") {
        auto meta = require_meta(ctx);
        auto parent = load_node(ctx, args::str(a, "parent"));
        const auto grantee_id = args::str(a, "grantee");
        auto added = conditions_arg(a);
        auto sub_limit = sub_limit_arg(a);
        if (caller.id != parent.grantee) throw ContractError("not-grantee", caller.id);
        if (parent.revoked) throw ContractError("revoked-parent", parent.id);
        auto grantee = ctx.directory().find(grantee_id);
        if (!grantee || grantee->id == meta.organisation || !grantee->belongs_to(meta.organisation))
            throw ContractError("foreign-grantee", grantee_id);

        DelegationNode child;
        child.id = "n" + std::to_string(meta.next_node++);
        child.grantor = caller.id;
        child.grantee = grantee_id;
        child.parent = parent.id;
        child.added = std::move(added);
        child.sub_limit = sub_limit;
        parent.children.push_back(child.id);
        auto index = grantee_nodes(ctx, grantee_id);
        index.push_back(child.id);
        ctx.put(grantee_key(grantee_id), json(index).dump());
        store_node(ctx, parent);
        store_node(ctx, child);
        store_meta(ctx, meta);
        return json{{"node", child.id}};
    }

    if (op == "revoke") {
        require_meta(ctx);
        auto node = load_node(ctx, args::str(a, "node"));
        bool allowed = caller.id == node.grantor;
        for (auto p = node.parent; !allowed && p;) {
            auto anc = load_node(ctx, *p);
            allowed = anc.grantee == caller.id;
            p = anc.parent;
        }
        if (!allowed) throw ContractError("not-authorized", caller.id);
        std::deque<NodeId> todo{node.id};
        json revoked = json::array();
        while (!todo.empty()) {
            auto n = load_node(ctx, todo.front());
            todo.pop_front();
            if (!n.revoked) {
                n.revoked = true;
                store_node(ctx, n);
                revoked.push_back(n.id);
            }
            todo.insert(todo.end(), n.children.begin(), n.children.end());
        }
        return json{{"revoked", revoked}};
    }

    if (op == "request_access") return request_access(ctx, a);
    if (op == "finish_trip") return finish_trip(ctx, a);

    if (op == "node") return to_json(load_node(ctx, args::str(a, "node")));
    if (op == "trip") {
        auto raw = ctx.get(trip_key(args::str(a, "trip_id")));
        if (!raw) throw ContractError("unknown-trip", args::str(a, "trip_id"));
        return json::parse(*raw);
    }
    if (op == "path") {
        json out = json::array();
        for (const auto& n : path_to(ctx, load_node(ctx, args::str(a, "node")))) out.push_back(to_json(n));
        return out;
    }

    throw ContractError("unknown-operation", std::string(op));
}

std::shared_ptr<const Contract> make_access_contract() { return std::make_shared<AccessContract>(); }

}  // namespace transit::access
