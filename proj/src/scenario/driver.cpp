#include "transit/scenario/scenario.hpp"

#include "transit/ledger/gateway.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace transit::scenario {

using nlohmann::json;

NegotiationOutcome negotiate(const PrincipalId& company, const PrincipalId& organisation,
                             std::int64_t ask, std::int64_t bid, std::int64_t credits,
                             std::map<std::string, std::int64_t> price_list) {
    NegotiationOutcome out;
    out.agreed = bid >= ask;
    out.proposal = token::Proposal{company, organisation, credits, ask, std::move(price_list)};
    return out;
}

ContractSet standard_contracts() {
    ContractSet set;
    for (auto c : {token::make_token_contract(), access::make_access_contract()})
        set.emplace(std::string(c->name()), c);
    return set;
}

std::unique_ptr<Network> make_transport_network(NetworkOptions options) {
    auto net = std::make_unique<Network>(std::move(options));
    for (const auto& [_, c] : standard_contracts()) net->install(c);
    return net;
}

Driver::Driver(Network& network, Millis start)
    : net_(network), clock_(start), events_(std::make_shared<std::vector<Event>>()) {
    for (const auto& name : net_.channel_names()) watch(net_.channel(name));
}

void Driver::watch(Channel& ch) {
    ch.subscribe([sink = events_](const Event& e) { sink->push_back(e); });
}

void Driver::register_principal(const Principal& p) { net_.register_principal(p, now()); }

Channel& Driver::create_channel(const std::string& name, const PrincipalId& organisation,
                                const std::vector<PrincipalId>& companies) {
    auto& ch = net_.create_channel(name, organisation, companies, now());
    watch(ch);
    return ch;
}

TransactionRecord Driver::execute(const std::string& channel, const PrincipalId& submitter,
                                  Invocation invocation) {
    auto& ch = net_.channel(channel);
    const auto id = ch.submit(submitter, std::move(invocation), now());
    for (;;) {
        if (auto tx = ch.transaction(id); tx && tx->validity) return *tx;
        if (!ch.commit_block(now())) throw Error(Errc::state_error, "transaction " + id + " vanished");
    }
}

json Driver::expect(const std::string& channel, const PrincipalId& submitter, Invocation invocation) {
    const auto what = invocation.contract + "." + invocation.op;
    auto tx = execute(channel, submitter, std::move(invocation));
    if (tx.validity != Validity::valid)
        throw Error(Errc::state_error, what + " by " + submitter + " failed: " +
                                           (tx.error.empty() ? std::string(to_string(*tx.validity)) : tx.error));
    return tx.result;
}

std::vector<Block> Driver::flush(const std::string& channel) {
    auto& ch = net_.channel(channel);
    std::vector<Block> out;
    while (auto b = ch.commit_block(now())) out.push_back(std::move(*b));
    return out;
}

PurchaseOutcome run_purchase(Driver& d, const std::string& channel, const token::Proposal& proposal,
                             std::optional<std::int64_t> tokens, std::optional<std::int64_t> payment) {
    const auto first_event = d.events().size();
    auto init = d.expect(channel, proposal.company,
                         {"token", "init", json{{"proposal", token::to_json(proposal)}}});
    d.expect(channel, proposal.company,
             {"token", "deposit_tokens",
              json{{"company", proposal.company}, {"amount", tokens.value_or(proposal.credit_amount)}}});
    auto last = d.expect(channel, proposal.organisation,
                         {"token", "deposit_payment",
                          json{{"company", proposal.company},
                               {"amount", payment.value_or(proposal.total_price)}}});

    PurchaseOutcome out;
    out.phase = token::parse_phase(last.at("phase").get<std::string>());
    out.generation = init.at("generation").get<std::int64_t>();
    for (auto i = first_event; i < d.events().size(); ++i) {
        const auto& e = d.events()[i];
        if (e.channel == channel && (e.name == "token-released" || e.name == "escrow-rolled-back"))
            out.events.push_back(e);
    }

    const auto expected = out.phase == token::Phase::released ? "token-released" : "escrow-rolled-back";
    if (!token::is_terminal(out.phase) || out.events.size() != 1 || out.events[0].name != expected)
        throw Error(Errc::state_error, "escrow for " + proposal.company + " did not resolve with " + expected);
    if (out.phase == token::Phase::released) {
        const auto& notify = out.events[0].payload.at("notify");
        for (const auto& party : {proposal.company, proposal.organisation})
            if (std::find(notify.begin(), notify.end(), json(party)) == notify.end())
                throw Error(Errc::state_error, "release was not confirmed to " + party);
    }
    return out;
}

std::string_view to_string(TripOutcome o) noexcept {
    switch (o) {
    case TripOutcome::approved: return "approved";
    case TripOutcome::denied: return "denied";
    case TripOutcome::finished: return "finished";
    case TripOutcome::skipped: return "skipped";
    }
    return "?";
}

json to_json(const TripEntry& e) {
    auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
    return json{{"trip_id", e.trip.trip_id},
                {"channel", e.channel},
                {"employee", e.trip.employee},
                {"company", e.trip.company},
                {"transport", e.trip.transport},
                {"max_cost", e.trip.max_cost},
                {"outcome", to_string(e.outcome)},
                {"reason", e.reason},
                {"hold_id", e.hold_id},
                {"node", e.node},
                {"requested_at", e.requested_at},
                {"employee_confirmed_at", opt(e.employee_confirmed_at)},
                {"finished_at", opt(e.finished_at)},
                {"actual_cost", opt(e.actual_cost)},
                {"request_tx", e.request_tx},
                {"finish_tx", e.finish_tx}};
}

namespace {

Invocation request_of(const TripPlan& p) {
    return {"access", "request_access", json{{"trip", access::to_json(p.request)}}};
}

std::string error_code(const TransactionRecord& tx) {
    if (tx.validity == Validity::mvcc_conflict) return "mvcc-conflict";
    return tx.error.substr(0, tx.error.find(": "));
}

TripEntry entry_from_request(const std::string& channel, const TripPlan& plan, const TransactionRecord& tx) {
    TripEntry e;
    e.trip = plan.request;
    e.channel = channel;
    e.requested_at = tx.submit_time;
    e.request_tx = tx.tx_id;
    if (tx.validity != Validity::valid) {
        e.outcome = TripOutcome::denied;
        e.reason = error_code(tx);
        return e;
    }
    auto decision = access::Decision::from_json(tx.result);
    e.outcome = decision.approved ? TripOutcome::approved : TripOutcome::denied;
    e.reason = decision.reason;
    e.hold_id = decision.hold_id;
    e.node = decision.node;
    return e;
}

Invocation finish_of(const TripEntry& e, std::int64_t actual) {
    return {"access", "finish_trip", json{{"trip_id", e.trip.trip_id}, {"actual_cost", actual}}};
}

void apply_finish(TripEntry& e, const TransactionRecord& tx) {
    e.finish_tx = tx.tx_id;
    if (tx.validity == Validity::valid) {
        e.outcome = TripOutcome::finished;
        e.finished_at = tx.commit_time;
        e.actual_cost = tx.result.at("actual_cost").get<std::int64_t>();
    } else {
        e.reason = "finish-failed:" + error_code(tx);
    }
}

}  // namespace

TripEntry run_trip(Driver& d, const std::string& channel, const TripPlan& plan) {
    const auto submitter = plan.submitter.value_or(plan.request.employee);
    auto entry = entry_from_request(channel, plan, d.execute(channel, submitter, request_of(plan)));
    if (entry.outcome != TripOutcome::approved || !plan.actual_cost) return entry;
    d.advance_by(plan.duration);
    entry.employee_confirmed_at = d.now();
    apply_finish(entry, d.execute(channel, plan.request.company, finish_of(entry, *plan.actual_cost)));
    return entry;
}

std::vector<TripEntry> run_trip_batch(Driver& d, const std::string& channel,
                                      const std::vector<TripPlan>& plans, std::uint64_t seed,
                                      int retry_limit) {
    std::vector<std::size_t> order(plans.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    auto& ch = d.network().channel(channel);
    auto drain = [&](Gateway& gw) {
        while (gw.in_flight() > 0) {
            auto block = ch.commit_block(d.now());
            if (!block) throw Error(Errc::state_error, "pending queue drained with transactions in flight");
            gw.on_block(*block, d.now());
        }
    };

    Gateway requests(ch, retry_limit);
    std::vector<Gateway::Ticket> tickets(plans.size());
    for (auto i : order)
        tickets[i] = requests.submit(plans[i].submitter.value_or(plans[i].request.employee),
                                     request_of(plans[i]), d.now());
    drain(requests);

    std::vector<TripEntry> entries;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& sub = requests.submission(tickets[i]);
        entries.push_back(entry_from_request(channel, plans[i], *sub.final));
        entries.back().requested_at = sub.first_submit;
    }

    std::vector<std::size_t> finishing;
    for (std::size_t i = 0; i < plans.size(); ++i)
        if (entries[i].outcome == TripOutcome::approved && plans[i].actual_cost) finishing.push_back(i);
    std::stable_sort(finishing.begin(), finishing.end(),
                     [&](auto a, auto b) { return plans[a].duration < plans[b].duration; });

    const auto start = d.now();
    for (std::size_t k = 0; k < finishing.size();) {
        const auto at = start + plans[finishing[k]].duration;
        d.advance_to(at);
        Gateway finishes(ch, retry_limit);
        std::vector<std::pair<std::size_t, Gateway::Ticket>> group;
        for (; k < finishing.size() && start + plans[finishing[k]].duration == at; ++k) {
            auto& e = entries[finishing[k]];
            e.employee_confirmed_at = d.now();
            group.emplace_back(finishing[k], finishes.submit(e.trip.company,
                                                             finish_of(e, *plans[finishing[k]].actual_cost),
                                                             d.now()));
        }
        drain(finishes);
        for (auto [i, t] : group) apply_finish(entries[i], *finishes.submission(t).final);
    }
    return entries;
}

}  // namespace transit::scenario
