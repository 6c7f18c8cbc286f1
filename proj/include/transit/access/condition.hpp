#pragma once

#include "transit/common/clock.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace transit::access {

struct GeoPoint {
    double lat = 0;  // degrees
    double lon = 0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Great-circle distance in meters (haversine, mean Earth radius).
double haversine_m(GeoPoint a, GeoPoint b);

constexpr double kEarthRadiusM = 6371008.8;
/// Geofence boundary slack; a point at radius + slack still counts as inside.
constexpr double kGeofenceSlackM = 1.0;

struct Condition;

/// [start, end) in minutes of the UTC day; start > end wraps past midnight.
struct TimeWindow {
    int start = 0;
    int end = 24 * 60;
    std::set<Weekday> days;
    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

enum class GeoTarget { origin, destination, both };

struct Geofence {
    GeoPoint center;
    double radius_m = 0;
    GeoTarget applies_to = GeoTarget::both;
    friend bool operator==(const Geofence&, const Geofence&) = default;
};

struct TransportTypes {
    std::set<std::string> allowed;
    friend bool operator==(const TransportTypes&, const TransportTypes&) = default;
};

struct RoleIs {
    std::set<std::string> roles;
    friend bool operator==(const RoleIs&, const RoleIs&) = default;
};

struct MaxPerTrip {
    std::int64_t credits = 0;
    friend bool operator==(const MaxPerTrip&, const MaxPerTrip&) = default;
};

/// Statically a single trip may not exceed the budget; the running total per
/// period is enforced by the access contract's spend counters.
struct BudgetPerPeriod {
    std::int64_t credits = 0;
    Period period = Period::month;
    friend bool operator==(const BudgetPerPeriod&, const BudgetPerPeriod&) = default;
};

struct All {
    std::vector<Condition> of;
    friend bool operator==(const All&, const All&) = default;
};

struct Condition {
    std::variant<All, TimeWindow, Geofence, TransportTypes, RoleIs, MaxPerTrip, BudgetPerPeriod> node;

    Condition() = default;
    template <class T>
    Condition(T leaf) : node(std::move(leaf)) {}

    static Condition always() { return Condition(All{}); }

    friend bool operator==(const Condition&, const Condition&) = default;
};

/// Everything the evaluator looks at for one access request.
struct TripContext {
    Millis time = 0;
    GeoPoint origin;
    GeoPoint destination;
    std::string transport;
    std::string role;
    std::int64_t amount = 0;
};

struct Verdict {
    bool ok = true;
    std::string failed;  // label of the first failing leaf, empty when ok

    explicit operator bool() const noexcept { return ok; }
};

/// Pure and total. Leaves are visited depth-first, left to right; the first
/// failing leaf names the verdict.
Verdict evaluate(const Condition& c, const TripContext& ctx);

/// Conjunction of a root-to-node path of added conditions.
Verdict evaluate_path(const std::vector<const Condition*>& path, const TripContext& ctx);

std::string_view leaf_label(const Condition& c);

/// Collects BudgetPerPeriod leaves anywhere in the tree.
void collect_budgets(const Condition& c, std::vector<BudgetPerPeriod>& out);

/// Canonical JSON with a "kind" discriminator.
nlohmann::json to_json(const Condition& c);
/// Throws Error(invalid_argument) naming the offending field.
Condition condition_from_json(const nlohmann::json& j);

}  // namespace transit::access
