#pragma once

#include "transit/access/condition.hpp"
#include "transit/ledger/contract.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace transit::access {

using NodeId = std::string;

inline constexpr std::string_view kRootNode = "root";

struct SubLimit {
    std::int64_t credits = 0;
    Period period = Period::month;
    friend bool operator==(const SubLimit&, const SubLimit&) = default;
};

/// One grant in the delegation tree. The effective condition of a node is
/// the conjunction of `added` along the path from the root, so a child can
/// only ever narrow what its parent allows.
struct DelegationNode {
    NodeId id;
    PrincipalId grantor;
    PrincipalId grantee;
    std::optional<NodeId> parent;  // absent only for the root
    Condition added = Condition::always();
    std::optional<SubLimit> sub_limit;
    bool revoked = false;
    std::vector<NodeId> children;
};

struct TripRequest {
    std::string trip_id;
    PrincipalId employee;
    PrincipalId company;
    std::string transport;
    GeoPoint origin;
    GeoPoint destination;
    std::int64_t max_cost = 0;
};

enum class TripStatus { approved, finished };

/// A (node, period) spend counter charged by a trip.
struct Charge {
    NodeId node;
    std::string period_key;
    friend bool operator==(const Charge&, const Charge&) = default;
};

/// Only approved trips are stored; denials leave no state behind and are
/// visible in the transaction result.
struct TripRecord {
    TripRequest trip;
    TripStatus status = TripStatus::approved;
    std::string hold_id;
    NodeId node;
    Millis requested_at = 0;
    std::vector<Charge> charges;
    std::optional<std::int64_t> actual_cost;
};

nlohmann::json to_json(const DelegationNode& n);
DelegationNode node_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TripRequest& t);
/// Throws ContractError(invalid-trip) for malformed requests.
TripRequest trip_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TripRecord& r);
TripRecord trip_record_from_json(const nlohmann::json& j);

std::string_view to_string(TripStatus s) noexcept;

/// Outcome of request_access as carried in the transaction result.
struct Decision {
    bool approved = false;
    std::string reason;   // "approved" or a denial reason
    std::string hold_id;  // approved only
    NodeId node;          // node that granted the request

    static Decision from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Rules-only decision for a root-first path: every added condition holds and
/// the amount fits each static budget bound (sub-limits and BudgetPerPeriod).
/// Ignores the pool balance and the running period usage.
Verdict approved_by_rules(const std::vector<DelegationNode>& path, const TripContext& ctx);

namespace keys {
std::string node(std::string_view id);
std::string trip(std::string_view trip_id);
std::string usage(std::string_view node, std::string_view period_key);
std::string spent(std::string_view node, std::string_view period_key);
inline constexpr std::string_view meta = "access/meta";
}  // namespace keys

/// The access control smart contract.
///
/// Operations:
///   deploy          {conditions}                                  channel organisation
///   delegate        {parent, grantee, conditions[, sub_limit]}    parent's grantee
///   revoke          {node}                                        grantor or ancestor grantee
///   request_access  {trip}                                        employee or trip company
///   finish_trip     {trip_id, actual_cost}                        the trip's transport company
///   node / trip / path                                            read-only helpers
///
/// request_access never fails for business reasons: denials are returned as
/// {"decision":"denied","reason":...} and write nothing. Reasons:
/// duplicate-trip, no-delegation, revoked, insufficient-pool,
/// condition-failed:<Leaf>, budget-exceeded.
class AccessContract final : public Contract {
public:
    std::string_view name() const override { return "access"; }
    nlohmann::json invoke(TxContext& ctx, std::string_view op,
                          const nlohmann::json& args) const override;
};

std::shared_ptr<const Contract> make_access_contract();

}  // namespace transit::access
