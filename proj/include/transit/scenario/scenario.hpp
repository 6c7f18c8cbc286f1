#pragma once

#include "transit/access/access_contract.hpp"
#include "transit/common/error.hpp"
#include "transit/ledger/network.hpp"
#include "transit/token/token_contract.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace transit::scenario {

struct NegotiationOutcome {
    token::Proposal proposal;
    bool agreed = false;
};

/// Off-chain price agreement stub: agreed iff bid >= ask, closing at the ask.
NegotiationOutcome negotiate(const PrincipalId& company, const PrincipalId& organisation,
                             std::int64_t ask, std::int64_t bid, std::int64_t credits,
                             std::map<std::string, std::int64_t> price_list);

/// Token and access contracts.
ContractSet standard_contracts();
std::unique_ptr<Network> make_transport_network(NetworkOptions options = {});

/// Owns the clock and the submission order for one network.
class Driver {
public:
    Driver(Network& network, Millis start);

    Network& network() noexcept { return net_; }
    Millis now() const { return clock_.now(); }
    void advance_to(Millis t) { clock_.advance_to(t); }
    void advance_by(Millis d) { clock_.advance_by(d); }

    void register_principal(const Principal& p);
    Channel& create_channel(const std::string& name, const PrincipalId& organisation,
                            const std::vector<PrincipalId>& companies);

    /// Submits and commits blocks until the transaction is ordered.
    TransactionRecord execute(const std::string& channel, const PrincipalId& submitter,
                              Invocation invocation);
    /// execute(), then throws state-error unless the transaction is valid.
    nlohmann::json expect(const std::string& channel, const PrincipalId& submitter,
                          Invocation invocation);
    /// Commits until nothing is pending on the channel.
    std::vector<Block> flush(const std::string& channel);

    /// Events of every channel created through this driver, in delivery order.
    const std::vector<Event>& events() const noexcept { return *events_; }

private:
    void watch(Channel& ch);

    Network& net_;
    SimClock clock_;
    std::shared_ptr<std::vector<Event>> events_;  // shared with channel listeners
};

struct PurchaseOutcome {
    token::Phase phase = token::Phase::initialized;
    std::int64_t generation = 0;
    std::vector<Event> events;  // token-released or escrow-rolled-back
};

/// Initialises the escrow and deposits both sides. Deposits default to the
/// proposal's amounts. Throws state-error if the confirmation events for the
/// outcome are missing.
PurchaseOutcome run_purchase(Driver& d, const std::string& channel, const token::Proposal& proposal,
                             std::optional<std::int64_t> tokens = {},
                             std::optional<std::int64_t> payment = {});

struct TripPlan {
    access::TripRequest request;
    std::optional<PrincipalId> submitter;      // employee when absent
    std::optional<std::int64_t> actual_cost;   // no finish when absent
    Millis duration = 0;
};

enum class TripOutcome { approved, denied, finished, skipped };
std::string_view to_string(TripOutcome o) noexcept;

/// One line of the trip ledger. The employee's app confirmation is an
/// off-chain record only; Finish_Trip is the company's transaction.
struct TripEntry {
    access::TripRequest trip;
    std::string channel;
    TripOutcome outcome = TripOutcome::denied;
    std::string reason;
    std::string hold_id;
    std::string node;
    Millis requested_at = 0;
    std::optional<Millis> employee_confirmed_at;
    std::optional<Millis> finished_at;
    std::optional<std::int64_t> actual_cost;
    TxId request_tx;
    TxId finish_tx;
};

nlohmann::json to_json(const TripEntry& e);

TripEntry run_trip(Driver& d, const std::string& channel, const TripPlan& plan);

/// Submits every request at the current time in a seed-shuffled order,
/// retrying MVCC conflicts, then finishes the approved ones in order of
/// duration. Entries come back in plan order.
std::vector<TripEntry> run_trip_batch(Driver& d, const std::string& channel,
                                      const std::vector<TripPlan>& plans, std::uint64_t seed,
                                      int retry_limit = 3);

struct ChannelSpec {
    std::string name;
    PrincipalId organisation;
    std::vector<PrincipalId> companies;
};

struct FundingSpec {
    std::string channel;
    PrincipalId owner;
    std::int64_t amount = 0;
};

struct PurchaseSpec {
    std::string channel;
    PrincipalId company;
    std::int64_t ask = 0;
    std::int64_t bid = 0;
    std::int64_t credits = 0;
    std::map<std::string, std::int64_t> price_list;
    std::optional<std::int64_t> deposit_tokens;
    std::optional<std::int64_t> deposit_payment;
};

struct AccessSpec {
    std::string channel;
    access::Condition conditions = access::Condition::always();
};

struct DelegationSpec {
    enum class Action { delegate, revoke } action = Action::delegate;
    std::string channel;
    PrincipalId as;
    std::string parent;  // label or node id (delegate); target (revoke)
    PrincipalId grantee;
    access::Condition conditions = access::Condition::always();
    std::optional<access::SubLimit> sub_limit;
    std::string label;
};

struct TripSpec {
    std::string channel;
    TripPlan plan;
    std::optional<Millis> at;
    std::string batch;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    Millis start_time = 0;
    std::size_t block_size = 50;
    std::vector<Principal> principals;
    std::vector<ChannelSpec> channels;
    std::vector<FundingSpec> funding;
    std::vector<PurchaseSpec> purchases;
    std::vector<AccessSpec> access;
    std::vector<DelegationSpec> delegations;
    std::vector<TripSpec> trips;
};

/// Parses and validates a scenario document. Throws validation-error with
/// "line L, column C: <json pointer>: <message>".
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

struct PurchaseRecord {
    std::string channel;
    PrincipalId company;
    bool agreed = false;
    std::optional<token::Phase> phase;
};

struct ScenarioResult {
    std::string name;
    std::uint64_t seed = 0;
    std::unique_ptr<Network> network;
    Digest setup_hash;  // after purchases and delegations, before any trip
    Digest state_hash;
    std::vector<Event> events;
    std::vector<PurchaseRecord> purchases;
    std::vector<TripEntry> trips;

    nlohmann::json summary() const;
};

ScenarioResult run_scenario(const Scenario& s);

/// base.log, channels/<name>.log and events.jsonl under `dir`.
void write_network_logs(const Network& network, const std::vector<Event>& events,
                        const std::filesystem::path& dir);

}  // namespace transit::scenario
