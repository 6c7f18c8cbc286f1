#include "transit/token/token_contract.hpp"

#include "transit/common/error.hpp"
#include "transit/ledger/args.hpp"

#include <charconv>

namespace transit::token {

using nlohmann::json;

bool Proposal::well_formed() const {
    if (company.empty() || organisation.empty()) return false;
    if (credit_amount <= 0 || total_price <= 0 || price_list.empty()) return false;
    for (const auto& [_, price] : price_list)
        if (price < 0) return false;
    return true;
}

std::string_view to_string(Phase p) noexcept {
    switch (p) {
    case Phase::initialized: return "initialized";
    case Phase::tokens_deposited: return "tokens-deposited";
    case Phase::payment_deposited: return "payment-deposited";
    case Phase::released: return "released";
    case Phase::rolled_back: return "rolled-back";
    }
    return "?";
}

Phase parse_phase(std::string_view s) {
    for (auto p : {Phase::initialized, Phase::tokens_deposited, Phase::payment_deposited,
                   Phase::released, Phase::rolled_back})
        if (to_string(p) == s) return p;
    throw Error(Errc::invalid_argument, "unknown escrow phase '" + std::string(s) + "'");
}

json to_json(const Proposal& p) {
    return json{{"company", p.company},
                {"organisation", p.organisation},
                {"credit_amount", p.credit_amount},
                {"total_price", p.total_price},
                {"price_list", p.price_list}};
}

Proposal proposal_from_json(const json& j) {
    Proposal p;
    p.company = args::str(j, "company");
    p.organisation = args::str(j, "organisation");
    p.credit_amount = args::integer(j, "credit_amount");
    p.total_price = args::integer(j, "total_price");
    const auto& pl = args::required(j, "price_list");
    if (!pl.is_object()) throw ContractError("bad-argument", "price_list must be an object");
    for (const auto& [k, v] : pl.items()) {
        if (!v.is_number_integer()) throw ContractError("bad-argument", "price_list values must be integers");
        p.price_list[k] = v.get<std::int64_t>();
    }
    return p;
}

json to_json(const EscrowRecord& e) {
    return json{{"proposal", to_json(e.proposal)},
                {"phase", to_string(e.phase)},
                {"escrowed_tokens", e.escrowed_tokens},
                {"escrowed_payment", e.escrowed_payment},
                {"tokens_in", e.tokens_in},
                {"payment_in", e.payment_in},
                {"generation", e.generation}};
}

EscrowRecord escrow_from_json(const json& j) {
    EscrowRecord e;
    e.proposal = proposal_from_json(j.at("proposal"));
    e.phase = parse_phase(j.at("phase").get<std::string>());
    e.escrowed_tokens = j.at("escrowed_tokens").get<std::int64_t>();
    e.escrowed_payment = j.at("escrowed_payment").get<std::int64_t>();
    e.tokens_in = j.at("tokens_in").get<bool>();
    e.payment_in = j.at("payment_in").get<bool>();
    e.generation = j.at("generation").get<std::int64_t>();
    return e;
}

json to_json(const HoldRecord& h) {
    return json{{"hold_id", h.hold_id}, {"trip_id", h.trip_id}, {"employee", h.employee},
                {"company", h.company}, {"max_amount", h.max_amount}};
}

HoldRecord hold_from_json(const json& j) {
    return HoldRecord{j.at("hold_id").get<std::string>(), j.at("trip_id").get<std::string>(),
                      j.at("employee").get<std::string>(), j.at("company").get<std::string>(),
                      j.at("max_amount").get<std::int64_t>()};
}

std::string hold_id_for(std::string_view trip_id) { return "hold-" + std::string(trip_id); }

namespace keys {
namespace {
std::string local(std::string_view prefix, std::string_view id) {
    std::string k(prefix);
    k.append(id);
    return k;
}
}  // namespace
std::string escrow(std::string_view company) { return local("token/escrow/", company); }
std::string account(std::string_view owner) { return local("token/account/", owner); }
std::string pool(std::string_view company) { return local("token/pool/", company); }
std::string held(std::string_view company) { return local("token/held/", company); }
std::string spent(std::string_view company) { return local("token/spent/", company); }
std::string credited(std::string_view company) { return local("token/credited/", company); }
std::string hold(std::string_view hold_id) { return local("token/hold/", hold_id); }
}  // namespace keys

std::int64_t Ledgerbook::total_currency() const {
    std::int64_t sum = escrowed_payment;
    for (const auto& [_, v] : accounts) sum += v;
    return sum;
}

bool Ledgerbook::conserved() const {
    if (total_currency() != supply) return false;
    for (const auto& [_, v] : accounts)
        if (v < 0) return false;
    for (const auto& [company, b] : balances) {
        if (b.pool_available < 0 || b.held < 0 || b.spent < 0) return false;
        auto c = credited.find(company);
        const std::int64_t total = c == credited.end() ? 0 : c->second;
        if (total != b.pool_available + b.held + b.spent) return false;
        auto hs = hold_sum.find(company);
        if ((hs == hold_sum.end() ? 0 : hs->second) != b.held) return false;
    }
    return true;
}

Ledgerbook read_ledgerbook(const WorldState& state) {
    Ledgerbook book;
    auto to_int = [](const std::string& s) {
        std::int64_t v = 0;
        std::from_chars(s.data(), s.data() + s.size(), v);
        return v;
    };
    auto strip = [](std::string_view key, std::string_view prefix) -> std::optional<std::string> {
        if (key.substr(0, prefix.size()) != prefix) return std::nullopt;
        return std::string(key.substr(prefix.size()));
    };
    auto it = state.entries().lower_bound(std::string_view("token/"));
    for (; it != state.entries().end() && it->first.compare(0, 6, "token/") == 0; ++it) {
        const auto& [key, vv] = *it;
        if (key == keys::supply) {
            book.supply = to_int(vv.value);
        } else if (auto id = strip(key, "token/account/")) {
            book.accounts[*id] = to_int(vv.value);
        } else if (auto c = strip(key, "token/escrow/")) {
            book.escrowed_payment += escrow_from_json(json::parse(vv.value)).escrowed_payment;
        } else if (auto c2 = strip(key, "token/credited/")) {
            book.credited[*c2] = to_int(vv.value);
            book.balances[*c2];
        } else if (auto p = strip(key, "token/pool/")) {
            book.balances[*p].pool_available = to_int(vv.value);
        } else if (auto h = strip(key, "token/held/")) {
            book.balances[*h].held = to_int(vv.value);
        } else if (auto s = strip(key, "token/spent/")) {
            book.balances[*s].spent = to_int(vv.value);
        } else if (strip(key, "token/hold/")) {
            auto rec = hold_from_json(json::parse(vv.value));
            book.hold_sum[rec.company] += rec.max_amount;
        }
    }
    return book;
}

namespace {

// Contract-local key helpers (TxContext adds the "token/" namespace).
std::string escrow_key(std::string_view c) { return "escrow/" + std::string(c); }
std::string account_key(std::string_view o) { return "account/" + std::string(o); }
std::string pool_key(std::string_view c) { return "pool/" + std::string(c); }
std::string held_key(std::string_view c) { return "held/" + std::string(c); }
std::string spent_key(std::string_view c) { return "spent/" + std::string(c); }
std::string credited_key(std::string_view c) { return "credited/" + std::string(c); }
std::string hold_key(std::string_view h) { return "hold/" + std::string(h); }

EscrowRecord load_escrow(TxContext& ctx, const std::string& company) {
    auto raw = ctx.get(escrow_key(company));
    if (!raw) throw ContractError("unknown-escrow", company);
    return escrow_from_json(json::parse(*raw));
}

void store_escrow(TxContext& ctx, const EscrowRecord& e) {
    ctx.put(escrow_key(e.proposal.company), to_json(e).dump());
}

void require_access_caller(const TxContext& ctx) {
    if (ctx.caller_contract() != "access")
        throw ContractError("not-authorized", "only the access contract may move pool credits");
}

json phase_result(const EscrowRecord& e) {
    return json{{"phase", to_string(e.phase)}, {"generation", e.generation}};
}

// Both deposits present: release iff both match the proposal, otherwise roll
// back and refund.
void resolve(TxContext& ctx, EscrowRecord& e) {
    if (!(e.tokens_in && e.payment_in)) return;
    const auto& p = e.proposal;
    if (e.escrowed_tokens == p.credit_amount && e.escrowed_payment == p.total_price) {
        ctx.add(pool_key(p.company), p.credit_amount);
        ctx.add(credited_key(p.company), p.credit_amount);
        ctx.add(account_key(p.company), e.escrowed_payment);
        e.escrowed_tokens = 0;
        e.escrowed_payment = 0;
        e.phase = Phase::released;
        ctx.emit("token-released", json{{"company", p.company},
                                        {"organisation", p.organisation},
                                        {"credits", p.credit_amount},
                                        {"price", p.total_price},
                                        {"generation", e.generation},
                                        {"notify", json::array({p.company, p.organisation})}});
    } else {
        const auto refunded_tokens = e.escrowed_tokens;
        const auto refunded_payment = e.escrowed_payment;
        ctx.add(account_key(p.organisation), refunded_payment);
        e.escrowed_tokens = 0;
        e.escrowed_payment = 0;
        e.phase = Phase::rolled_back;
        std::string reason = refunded_tokens != p.credit_amount ? "token-amount-mismatch" : "payment-amount-mismatch";
        ctx.emit("escrow-rolled-back", json{{"company", p.company},
                                            {"organisation", p.organisation},
                                            {"reason", reason},
                                            {"refunded_tokens", refunded_tokens},
                                            {"refunded_payment", refunded_payment},
                                            {"generation", e.generation},
                                            {"notify", json::array({p.company, p.organisation})}});
    }
}

bool viewer_allowed(const TxContext& ctx, const Principal& viewer) {
    if (viewer.kind == PrincipalKind::network_admin) return true;
    if (viewer.belongs_to(ctx.channel().organisation)) return true;
    for (const auto& c : ctx.channel().companies)
        if (c == viewer.id) return true;
    return false;
}

}  // namespace

json TokenContract::invoke(TxContext& ctx, std::string_view op, const json& a) const {
    const auto& caller = ctx.submitter();

    if (op == "mint") {
        if (caller.kind != PrincipalKind::network_admin)
            throw ContractError("not-authorized", "only the network admin mints currency");
        const auto owner = args::str(a, "owner");
        const auto amount = args::nonneg(a, "amount");
        if (!ctx.directory().contains(owner)) throw ContractError("unknown-principal", owner);
        ctx.add(account_key(owner), amount, 0);
        ctx.add("supply", amount);
        return json{{"owner", owner}, {"amount", amount}};
    }

    if (op == "init") {
        Proposal p = proposal_from_json(args::required(a, "proposal"));
        if (caller.id != p.company) throw ContractError("caller-not-company", caller.id);
        if (!p.well_formed()) throw ContractError("invalid-proposal", "credit amount, price and price list must be positive/non-empty");
        if (p.organisation != ctx.channel().organisation)
            throw ContractError("invalid-proposal", p.organisation + " is not this channel's organisation");
        EscrowRecord e;
        if (auto raw = ctx.get(escrow_key(p.company))) {
            auto prev = escrow_from_json(json::parse(*raw));
            if (!is_terminal(prev.phase)) throw ContractError("active-escrow-exists", p.company);
            e.generation = prev.generation + 1;
        }
        e.proposal = std::move(p);
        store_escrow(ctx, e);
        return phase_result(e);
    }

    if (op == "deposit_tokens") {
        auto e = load_escrow(ctx, args::str(a, "company"));
        const auto amount = args::nonneg(a, "amount");
        if (caller.id != e.proposal.company) throw ContractError("wrong-caller", caller.id);
        if (e.phase != Phase::initialized && e.phase != Phase::payment_deposited)
            throw ContractError("wrong-phase", std::string(to_string(e.phase)));
        e.escrowed_tokens = amount;
        e.tokens_in = true;
        e.phase = e.payment_in ? e.phase : Phase::tokens_deposited;
        resolve(ctx, e);
        store_escrow(ctx, e);
        return phase_result(e);
    }

    if (op == "deposit_payment") {
        auto e = load_escrow(ctx, args::str(a, "company"));
        const auto amount = args::nonneg(a, "amount");
        if (caller.id != e.proposal.organisation) throw ContractError("wrong-caller", caller.id);
        if (e.phase != Phase::initialized && e.phase != Phase::tokens_deposited)
            throw ContractError("wrong-phase", std::string(to_string(e.phase)));
        if (ctx.counter(account_key(caller.id)) < amount)
            throw ContractError("insufficient-funds", caller.id);
        ctx.add(account_key(caller.id), -amount, 0);
        e.escrowed_payment = amount;
        e.payment_in = true;
        e.phase = e.tokens_in ? e.phase : Phase::payment_deposited;
        resolve(ctx, e);
        store_escrow(ctx, e);
        return phase_result(e);
    }

    if (op == "try_release") {
        auto e = load_escrow(ctx, args::str(a, "company"));
        if (!is_terminal(e.phase) && e.tokens_in && e.payment_in) {
            resolve(ctx, e);
            store_escrow(ctx, e);
        }
        return phase_result(e);
    }

    if (op == "hold") {
        require_access_caller(ctx);
        const auto company = args::str(a, "company");
        const auto trip_id = args::str(a, "trip_id");
        const auto employee = args::str(a, "employee");
        const auto max = args::integer(a, "max");
        if (max <= 0) throw ContractError("bad-argument", "max must be positive");
        if (ctx.counter(credited_key(company)) <= 0) throw ContractError("wrong-phase", "no released credits from " + company);
        const auto hold_id = hold_id_for(trip_id);
        if (ctx.get(hold_key(hold_id))) throw ContractError("duplicate-trip-id", trip_id);
        if (ctx.counter(pool_key(company)) < max) throw ContractError("insufficient-pool", company);
        ctx.add(pool_key(company), -max, 0);
        ctx.add(held_key(company), max);
        HoldRecord h{hold_id, trip_id, employee, company, max};
        ctx.put(hold_key(hold_id), to_json(h).dump());
        ctx.emit("hold-created", json{{"hold_id", hold_id}, {"trip_id", trip_id}, {"employee", employee},
                                      {"company", company}, {"amount", max}});
        return json{{"hold_id", hold_id}};
    }

    if (op == "settle") {
        require_access_caller(ctx);
        const auto hold_id = args::str(a, "hold_id");
        const auto actual = args::nonneg(a, "actual");
        auto raw = ctx.get(hold_key(hold_id));
        if (!raw) throw ContractError("unknown-hold", hold_id);
        auto h = hold_from_json(json::parse(*raw));
        if (actual > h.max_amount) throw ContractError("over-hold-amount", std::to_string(actual) + " > " + std::to_string(h.max_amount));
        const auto refund = h.max_amount - actual;
        ctx.add(spent_key(h.company), actual);
        ctx.add(pool_key(h.company), refund);
        ctx.add(held_key(h.company), -h.max_amount);
        ctx.erase(hold_key(hold_id));
        json record{{"hold_id", hold_id}, {"trip_id", h.trip_id}, {"company", h.company},
                    {"actual", actual}, {"refund", refund}};
        ctx.emit("trip-settled", record);
        return record;
    }

    if (op == "price_of") {
        auto e = load_escrow(ctx, args::str(a, "company"));
        const auto transport = args::str(a, "transport");
        auto it = e.proposal.price_list.find(transport);
        if (it == e.proposal.price_list.end()) throw ContractError("unknown-transport", transport);
        return json{{"price", it->second}};
    }

    if (op == "available") {
        return json{{"pool_available", ctx.counter(pool_key(args::str(a, "company")))}};
    }

    if (op == "balance_of") {
        const auto company = args::str(a, "company");
        Principal viewer = caller;
        if (a.contains("viewer")) {
            auto v = ctx.directory().find(args::str(a, "viewer"));
            if (!v) throw ContractError("not-authorized", args::str(a, "viewer"));
            viewer = *v;
        }
        if (!viewer_allowed(ctx, viewer)) throw ContractError("not-authorized", viewer.id);
        return json{{"pool_available", ctx.counter(pool_key(company))},
                    {"held", ctx.counter(held_key(company))},
                    {"spent", ctx.counter(spent_key(company))}};
    }

    if (op == "escrow") {
        return to_json(load_escrow(ctx, args::str(a, "company")));
    }

    if (op == "account") {
        return json{{"balance", ctx.counter(account_key(args::str(a, "owner")))}};
    }

    throw ContractError("unknown-operation", std::string(op));
}

std::shared_ptr<const Contract> make_token_contract() { return std::make_shared<TokenContract>(); }

}  // namespace transit::token
