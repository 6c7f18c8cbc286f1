#include "transit/scenario/scenario.hpp"

#include "transit/ledger/block_log.hpp"

#include <fstream>

namespace transit::scenario {

using nlohmann::json;

namespace {

constexpr Millis kStep = 1000;

bool escrow_released(const Network& net, const std::string& channel, const PrincipalId& company) {
    auto raw = net.channel(channel).try_query(token::keys::escrow(company));
    return raw && token::escrow_from_json(json::parse(*raw)).phase == token::Phase::released;
}

TripEntry skipped(const TripSpec& t, Millis now) {
    TripEntry e;
    e.trip = t.plan.request;
    e.channel = t.channel;
    e.outcome = TripOutcome::skipped;
    e.reason = "escrow-not-released";
    e.requested_at = now;
    return e;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s) {
    NetworkOptions options;
    options.ledger.block_size = s.block_size;
    ScenarioResult out;
    out.name = s.name;
    out.seed = s.seed;
    out.network = make_transport_network(options);
    Driver d(*out.network, s.start_time);
    const auto admin = out.network->admin_id();

    for (const auto& p : s.principals) d.register_principal(p);
    d.advance_by(kStep);
    for (const auto& c : s.channels) d.create_channel(c.name, c.organisation, c.companies);
    d.advance_by(kStep);

    for (const auto& f : s.funding) {
        d.expect(f.channel, admin, {"token", "mint", json{{"owner", f.owner}, {"amount", f.amount}}});
        d.advance_by(kStep);
    }

    for (const auto& p : s.purchases) {
        const auto& org = out.network->channel(p.channel).config().organisation;
        auto deal = negotiate(p.company, org, p.ask, p.bid, p.credits, p.price_list);
        PurchaseRecord rec{p.channel, p.company, deal.agreed, std::nullopt};
        if (deal.agreed)
            rec.phase = run_purchase(d, p.channel, deal.proposal, p.deposit_tokens, p.deposit_payment).phase;
        out.purchases.push_back(rec);
        d.advance_by(kStep);
    }

    for (const auto& a : s.access) {
        const auto& org = out.network->channel(a.channel).config().organisation;
        d.expect(a.channel, org, {"access", "deploy", json{{"conditions", access::to_json(a.conditions)}}});
        d.advance_by(kStep);
    }

    std::map<std::string, std::map<std::string, access::NodeId>> labels;
    auto resolve = [&](const std::string& channel, const std::string& ref) {
        auto& known = labels[channel];
        auto it = known.find(ref);
        return it == known.end() ? ref : it->second;
    };
    for (const auto& del : s.delegations) {
        if (del.action == DelegationSpec::Action::revoke) {
            d.expect(del.channel, del.as, {"access", "revoke", json{{"node", resolve(del.channel, del.parent)}}});
        } else {
            json args{{"parent", resolve(del.channel, del.parent)},
                      {"grantee", del.grantee},
                      {"conditions", access::to_json(del.conditions)}};
            if (del.sub_limit)
                args["sub_limit"] = {{"credits", del.sub_limit->credits},
                                     {"period", to_string(del.sub_limit->period)}};
            auto r = d.expect(del.channel, del.as, {"access", "delegate", std::move(args)});
            if (!del.label.empty()) labels[del.channel][del.label] = r.at("node").get<std::string>();
        }
        d.advance_by(kStep);
    }
    out.setup_hash = out.network->combined_state_hash();

    std::uint64_t batch_no = 0;
    for (std::size_t i = 0; i < s.trips.size();) {
        const auto& first = s.trips[i];
        if (first.at) d.advance_to(*first.at);
        std::size_t end = i + 1;
        if (!first.batch.empty())
            while (end < s.trips.size() && s.trips[end].batch == first.batch && s.trips[end].channel == first.channel)
                ++end;

        std::vector<TripPlan> plans;
        std::vector<std::size_t> runnable;
        std::vector<TripEntry> entries(end - i);
        for (auto k = i; k < end; ++k) {
            if (escrow_released(*out.network, s.trips[k].channel, s.trips[k].plan.request.company)) {
                plans.push_back(s.trips[k].plan);
                runnable.push_back(k - i);
            } else {
                entries[k - i] = skipped(s.trips[k], d.now());
            }
        }
        if (first.batch.empty()) {
            if (!plans.empty()) entries[0] = run_trip(d, first.channel, plans[0]);
        } else if (!plans.empty()) {
            auto done = run_trip_batch(d, first.channel, plans, s.seed + batch_no++);
            for (std::size_t k = 0; k < done.size(); ++k) entries[runnable[k]] = std::move(done[k]);
        }
        for (auto& e : entries) out.trips.push_back(std::move(e));
        d.advance_by(kStep);
        i = end;
    }

    out.state_hash = out.network->combined_state_hash();
    out.events = d.events();
    return out;
}

json ScenarioResult::summary() const {
    json channels = json::object();
    for (const auto& name : network->channel_names()) {
        const auto& ch = network->channel(name);
        channels[name] = {{"organisation", ch.config().organisation},
                          {"height", ch.height()},
                          {"state_hash", ch.state_hash().hex()}};
    }
    json bought = json::array();
    for (const auto& p : purchases)
        bought.push_back({{"channel", p.channel},
                          {"company", p.company},
                          {"agreed", p.agreed},
                          {"phase", p.phase ? json(token::to_string(*p.phase)) : json(nullptr)}});
    json trip_list = json::array();
    json outcomes = json::object();
    for (const auto& t : trips) {
        trip_list.push_back(to_json(t));
        outcomes[std::string(to_string(t.outcome))] = outcomes.value(std::string(to_string(t.outcome)), 0) + 1;
    }
    json event_counts = json::object();
    for (const auto& e : events) event_counts[e.name] = event_counts.value(e.name, 0) + 1;
    return {{"name", name},
            {"seed", seed},
            {"state_hash", state_hash.hex()},
            {"setup_state_hash", setup_hash.hex()},
            {"base_height", network->base().height()},
            {"channels", channels},
            {"purchases", bought},
            {"trips", trip_list},
            {"trip_outcomes", outcomes},
            {"event_counts", event_counts}};
}

void write_network_logs(const Network& network, const std::vector<Event>& events,
                        const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "channels");
    write_block_log(dir / "base.log", network.base().blocks());
    for (const auto& name : network.channel_names())
        write_block_log(dir / "channels" / (name + ".log"), network.channel(name).blocks());
    std::ofstream out(dir / "events.jsonl", std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + (dir / "events.jsonl").string());
    for (const auto& e : events) out << to_json(e).dump() << '\n';
}

}  // namespace transit::scenario
