#include "transit/access/condition.hpp"

#include "transit/common/error.hpp"

#include <cmath>
#include <cstdio>

namespace transit::access {

using nlohmann::json;

double haversine_m(GeoPoint a, GeoPoint b) {
    constexpr double kRad = 3.14159265358979323846 / 180.0;
    const double dlat = (b.lat - a.lat) * kRad;
    const double dlon = (b.lon - a.lon) * kRad;
    const double s = std::sin(dlat / 2);
    const double t = std::sin(dlon / 2);
    const double h = s * s + std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * t * t;
    return 2 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

namespace {

bool in_window(const TimeWindow& w, Millis t) {
    if (!w.days.count(weekday_of(t))) return false;
    const int m = minute_of_day(t);
    if (w.start <= w.end) return m >= w.start && m < w.end;
    return m >= w.start || m < w.end;
}

bool inside(const Geofence& g, GeoPoint p) {
    return haversine_m(g.center, p) <= g.radius_m + kGeofenceSlackM;
}

struct Evaluator {
    const TripContext& ctx;

    bool leaf(const TimeWindow& w) const { return in_window(w, ctx.time); }
    bool leaf(const Geofence& g) const {
        switch (g.applies_to) {
        case GeoTarget::origin: return inside(g, ctx.origin);
        case GeoTarget::destination: return inside(g, ctx.destination);
        case GeoTarget::both: return inside(g, ctx.origin) && inside(g, ctx.destination);
        }
        return false;
    }
    bool leaf(const TransportTypes& t) const { return t.allowed.count(ctx.transport) != 0; }
    bool leaf(const RoleIs& r) const { return r.roles.count(ctx.role) != 0; }
    bool leaf(const MaxPerTrip& m) const { return ctx.amount <= m.credits; }
    bool leaf(const BudgetPerPeriod& b) const { return ctx.amount <= b.credits; }

    Verdict operator()(const Condition& c) const {
        if (const auto* all = std::get_if<All>(&c.node)) {
            for (const auto& child : all->of)
                if (auto v = (*this)(child); !v) return v;
            return {};
        }
        const bool ok = std::visit(
            [this](const auto& l) -> bool {
                if constexpr (std::is_same_v<std::decay_t<decltype(l)>, All>)
                    return true;
                else
                    return leaf(l);
            },
            c.node);
        if (ok) return {};
        return {false, std::string(leaf_label(c))};
    }
};

std::string hhmm(int minutes) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
    return buf;
}

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_argument, "condition: " + what); }

int parse_minute(const json& j, const char* field) {
    if (j.is_number_integer()) {
        auto v = j.get<int>();
        if (v < 0 || v > 24 * 60) bad(std::string(field) + " out of range");
        return v;
    }
    if (j.is_string()) {
        unsigned h = 0, m = 0;
        char extra = 0;
        const auto s = j.get<std::string>();
        if (std::sscanf(s.c_str(), "%2u:%2u%c", &h, &m, &extra) != 2 || m > 59 || h * 60 + m > 24 * 60)
            bad(std::string(field) + " must be HH:MM");
        return static_cast<int>(h * 60 + m);
    }
    bad(std::string(field) + " must be minutes or HH:MM");
}

const json& field(const json& j, const char* name) {
    if (!j.contains(name)) bad(std::string("missing field '") + name + "'");
    return j[name];
}

std::int64_t nonneg(const json& j, const char* name) {
    const auto& v = field(j, name);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad(std::string(name) + " must be a nonnegative integer");
    return v.get<std::int64_t>();
}

std::set<std::string> string_set(const json& j, const char* name) {
    const auto& v = field(j, name);
    if (!v.is_array()) bad(std::string(name) + " must be an array");
    std::set<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) bad(std::string(name) + " entries must be strings");
        out.insert(e.get<std::string>());
    }
    return out;
}

GeoPoint point_from(const json& j, const char* name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        bad(std::string(name) + " must be [lat, lon]");
    GeoPoint p{j[0].get<double>(), j[1].get<double>()};
    if (std::abs(p.lat) > 90 || std::abs(p.lon) > 180) bad(std::string(name) + " out of range");
    return p;
}

}  // namespace

Verdict evaluate(const Condition& c, const TripContext& ctx) { return Evaluator{ctx}(c); }

Verdict evaluate_path(const std::vector<const Condition*>& path, const TripContext& ctx) {
    for (const auto* c : path)
        if (auto v = evaluate(*c, ctx); !v) return v;
    return {};
}

std::string_view leaf_label(const Condition& c) {
    static constexpr std::string_view labels[] = {"All",    "TimeWindow", "Geofence",
                                                  "TransportTypes", "RoleIs", "MaxPerTrip",
                                                  "BudgetPerPeriod"};
    return labels[c.node.index()];
}

void collect_budgets(const Condition& c, std::vector<BudgetPerPeriod>& out) {
    if (const auto* all = std::get_if<All>(&c.node)) {
        for (const auto& child : all->of) collect_budgets(child, out);
    } else if (const auto* b = std::get_if<BudgetPerPeriod>(&c.node)) {
        out.push_back(*b);
    }
}

json to_json(const Condition& c) {
    return std::visit(
        [](const auto& l) -> json {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, All>) {
                json of = json::array();
                for (const auto& child : l.of) of.push_back(to_json(child));
                return {{"kind", "all"}, {"of", of}};
            } else if constexpr (std::is_same_v<T, TimeWindow>) {
                json days = json::array();
                for (auto d : l.days) days.push_back(to_string(d));
                return {{"kind", "time_window"}, {"start", hhmm(l.start)}, {"end", hhmm(l.end)}, {"days", days}};
            } else if constexpr (std::is_same_v<T, Geofence>) {
                const char* target = l.applies_to == GeoTarget::origin        ? "origin"
                                     : l.applies_to == GeoTarget::destination ? "destination"
                                                                              : "both";
                return {{"kind", "geofence"},
                        {"center", {l.center.lat, l.center.lon}},
                        {"radius_m", l.radius_m},
                        {"applies_to", target}};
            } else if constexpr (std::is_same_v<T, TransportTypes>) {
                return {{"kind", "transport_types"}, {"allowed", l.allowed}};
            } else if constexpr (std::is_same_v<T, RoleIs>) {
                return {{"kind", "role_is"}, {"roles", l.roles}};
            } else if constexpr (std::is_same_v<T, MaxPerTrip>) {
                return {{"kind", "max_per_trip"}, {"credits", l.credits}};
            } else {
                return {{"kind", "budget_per_period"}, {"credits", l.credits}, {"period", to_string(l.period)}};
            }
        },
        c.node);
}

Condition condition_from_json(const json& j) {
    if (!j.is_object()) bad("must be an object");
    const auto& kind_j = field(j, "kind");
    if (!kind_j.is_string()) bad("kind must be a string");
    const auto kind = kind_j.get<std::string>();
    if (kind == "all") {
        const auto& of = field(j, "of");
        if (!of.is_array()) bad("'of' must be an array");
        All all;
        for (const auto& child : of) all.of.push_back(condition_from_json(child));
        return all;
    }
    if (kind == "time_window") {
        TimeWindow w;
        w.start = parse_minute(field(j, "start"), "start");
        w.end = parse_minute(field(j, "end"), "end");
        for (const auto& d : string_set(j, "days")) w.days.insert(parse_weekday(d));
        return w;
    }
    if (kind == "geofence") {
        Geofence g;
        g.center = point_from(field(j, "center"), "center");
        const auto& r = field(j, "radius_m");
        if (!r.is_number() || r.get<double>() < 0) bad("radius_m must be a nonnegative number");
        g.radius_m = r.get<double>();
        const auto target = j.value("applies_to", std::string("both"));
        if (target == "origin") g.applies_to = GeoTarget::origin;
        else if (target == "destination") g.applies_to = GeoTarget::destination;
        else if (target == "both") g.applies_to = GeoTarget::both;
        else bad("applies_to must be origin, destination or both");
        return g;
    }
    if (kind == "transport_types") return TransportTypes{string_set(j, "allowed")};
    if (kind == "role_is") return RoleIs{string_set(j, "roles")};
    if (kind == "max_per_trip") return MaxPerTrip{nonneg(j, "credits")};
    if (kind == "budget_per_period") {
        const auto& p = field(j, "period");
        if (!p.is_string()) bad("period must be a string");
        return BudgetPerPeriod{nonneg(j, "credits"), parse_period(p.get<std::string>())};
    }
    bad("unknown kind '" + kind + "'");
}

}  // namespace transit::access
