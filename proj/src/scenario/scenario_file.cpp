#include "transit/scenario/scenario.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace transit::scenario {

using nlohmann::json;

namespace {

struct Invalid {
    std::vector<std::string> path;
    std::string message;
};

/// Finds the text offset of the value at a JSON path by scanning the source.
class Locator {
public:
    explicit Locator(std::string_view text) : s_(text) {}

    std::size_t find(const std::vector<std::string>& path) {
        i_ = 0;
        ws();
        std::size_t found = i_;
        for (const auto& token : path) {
            if (!descend(token)) break;
            ws();
            found = i_;
        }
        return found;
    }

private:
    void ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    void skip_string() {
        for (++i_; i_ < s_.size() && s_[i_] != '"'; ++i_)
            if (s_[i_] == '\\') ++i_;
        ++i_;
    }
    std::string read_string() {
        const auto b = i_;
        skip_string();
        return json::parse(s_.substr(b, i_ - b)).get<std::string>();
    }
    void skip_value() {
        ws();
        if (i_ >= s_.size()) return;
        if (s_[i_] == '"') return skip_string();
        if (s_[i_] == '{' || s_[i_] == '[') {
            int depth = 0;
            do {
                if (s_[i_] == '"') {
                    skip_string();
                    continue;
                }
                if (s_[i_] == '{' || s_[i_] == '[') ++depth;
                if (s_[i_] == '}' || s_[i_] == ']') --depth;
                ++i_;
            } while (depth > 0 && i_ < s_.size());
            return;
        }
        while (i_ < s_.size() && !std::strchr(",}] \t\r\n", s_[i_])) ++i_;
    }
    bool separator() {
        ws();
        if (i_ < s_.size() && s_[i_] == ',') {
            ++i_;
            return true;
        }
        return false;
    }
    bool descend(const std::string& token) {
        ws();
        if (i_ >= s_.size()) return false;
        if (s_[i_] == '{') {
            ++i_;
            do {
                ws();
                if (i_ >= s_.size() || s_[i_] != '"') return false;
                const auto key = read_string();
                ws();
                ++i_;  // ':'
                ws();
                if (key == token) return true;
                skip_value();
            } while (separator());
            return false;
        }
        if (s_[i_] == '[') {
            ++i_;
            const auto index = std::stoul(token);
            for (std::size_t k = 0;; ++k) {
                ws();
                if (k == index) return true;
                skip_value();
                if (!separator()) return false;
            }
        }
        return false;
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string pointer(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) out += "/" + p;
    return out.empty() ? "/" : out;
}

/// A JSON value plus its path, for error reporting.
class Node {
public:
    Node(const json& j, std::vector<std::string> path) : j_(j), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& message) const { throw Invalid{path_, message}; }

    const json& raw() const { return j_; }
    bool has(const char* key) const { return j_.contains(key) && !j_[key].is_null(); }

    Node operator[](const char* key) const {
        if (!j_.is_object()) fail("expected an object");
        if (!j_.contains(key)) fail(std::string("missing field '") + key + "'");
        return child(j_[key], key);
    }
    Node operator[](std::size_t i) const { return child(j_[i], std::to_string(i)); }

    void allow_only(std::initializer_list<const char*> keys) const {
        if (!j_.is_object()) fail("expected an object");
        for (const auto& [k, _] : j_.items()) {
            bool known = false;
            for (auto a : keys) known = known || k == a;
            if (!known) child(j_[k], k).fail("unknown field '" + k + "'");
        }
    }

    std::string str() const {
        if (!j_.is_string() || j_.get_ref<const std::string&>().empty()) fail("expected a non-empty string");
        return j_.get<std::string>();
    }
    std::int64_t integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<std::int64_t>();
    }
    std::int64_t nonneg() const {
        auto v = integer();
        if (v < 0) fail("must not be negative");
        return v;
    }
    std::int64_t positive() const {
        auto v = integer();
        if (v <= 0) fail("must be positive");
        return v;
    }
    double number() const {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }
    std::size_t size() const {
        if (!j_.is_array()) fail("expected an array");
        return j_.size();
    }
    Millis time() const {
        try {
            if (j_.is_number_integer()) return j_.get<Millis>();
            if (j_.is_string()) return parse_timestamp(j_.get<std::string>());
        } catch (const Error& e) {
            fail(e.what());
        }
        fail("expected a timestamp");
    }
    access::GeoPoint point() const {
        if (size() != 2) fail("expected [lat, lon]");
        access::GeoPoint p{(*this)[std::size_t{0}].number(), (*this)[std::size_t{1}].number()};
        if (std::abs(p.lat) > 90 || std::abs(p.lon) > 180) fail("coordinates out of range");
        return p;
    }
    access::Condition condition() const {
        try {
            return access::condition_from_json(j_);
        } catch (const Error& e) {
            fail(e.what());
        }
    }
    std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].str());
        return out;
    }
    template <class F>
    void each(const char* key, F&& f) const {
        if (!has(key)) return;
        auto list = (*this)[key];
        for (std::size_t i = 0; i < list.size(); ++i) f(list[i]);
    }

private:
    Node child(const json& j, std::string token) const {
        auto p = path_;
        p.push_back(std::move(token));
        return Node(j, std::move(p));
    }

    const json& j_;
    std::vector<std::string> path_;
};

Principal parse_principal(const Node& n) {
    n.allow_only({"id", "kind", "org", "role"});
    Principal p;
    p.id = n["id"].str();
    try {
        p.kind = parse_principal_kind(n["kind"].str());
    } catch (const Error&) {
        n["kind"].fail("unknown principal kind");
    }
    if (n.has("org")) p.org = n["org"].str();
    if (n.has("role")) p.role = n["role"].str();
    return p;
}

TripSpec parse_trip(const Node& n) {
    n.allow_only({"channel", "trip_id", "employee", "company", "transport", "origin", "destination",
                  "max_cost", "actual_cost", "duration_minutes", "at", "batch", "submitter"});
    TripSpec t;
    t.channel = n["channel"].str();
    auto& r = t.plan.request;
    r.trip_id = n["trip_id"].str();
    r.employee = n["employee"].str();
    r.company = n["company"].str();
    r.transport = n["transport"].str();
    r.origin = n["origin"].point();
    r.destination = n["destination"].point();
    r.max_cost = n["max_cost"].positive();
    if (n.has("actual_cost")) t.plan.actual_cost = n["actual_cost"].nonneg();
    if (n.has("duration_minutes")) t.plan.duration = n["duration_minutes"].nonneg() * kMinute;
    if (n.has("submitter")) t.plan.submitter = n["submitter"].str();
    if (n.has("at")) t.at = n["at"].time();
    if (n.has("batch")) t.batch = n["batch"].str();
    return t;
}

DelegationSpec parse_delegation(const Node& n) {
    n.allow_only({"channel", "action", "as", "parent", "node", "grantee", "conditions", "sub_limit", "label"});
    DelegationSpec d;
    d.channel = n["channel"].str();
    d.as = n["as"].str();
    const auto action = n.has("action") ? n["action"].str() : std::string("delegate");
    if (action == "delegate") {
        d.action = DelegationSpec::Action::delegate;
        d.parent = n["parent"].str();
        d.grantee = n["grantee"].str();
        if (n.has("conditions")) d.conditions = n["conditions"].condition();
        if (n.has("sub_limit")) {
            auto s = n["sub_limit"];
            s.allow_only({"credits", "period"});
            access::SubLimit sl;
            sl.credits = s["credits"].nonneg();
            try {
                sl.period = parse_period(s["period"].str());
            } catch (const Error&) {
                s["period"].fail("expected day, week or month");
            }
            d.sub_limit = sl;
        }
        if (n.has("label")) d.label = n["label"].str();
    } else if (action == "revoke") {
        d.action = DelegationSpec::Action::revoke;
        d.parent = n["node"].str();
    } else {
        n["action"].fail("expected delegate or revoke");
    }
    return d;
}

Scenario parse_document(const Node& root) {
    root.allow_only({"name", "seed", "start_time", "block_size", "principals", "channels", "funding",
                     "purchases", "access", "delegations", "trips"});
    Scenario s;
    if (root.has("name")) s.name = root["name"].str();
    if (root.has("seed")) s.seed = static_cast<std::uint64_t>(root["seed"].nonneg());
    if (root.has("start_time")) s.start_time = root["start_time"].time();
    if (root.has("block_size")) s.block_size = static_cast<std::size_t>(root["block_size"].positive());

    std::map<std::string, Principal> principals;
    root.each("principals", [&](const Node& n) {
        auto p = parse_principal(n);
        if (p.kind == PrincipalKind::network_admin) n["kind"].fail("the network admin is implicit");
        if (p.id == "admin") n["id"].fail("'admin' is reserved for the network admin");
        if (principals.count(p.id)) n["id"].fail("duplicate principal " + p.id);
        const bool needs_org = p.kind == PrincipalKind::employee || p.kind == PrincipalKind::department;
        if (needs_org && !p.org) n.fail("employees and departments need an 'org'");
        if (p.org) {
            auto it = principals.find(*p.org);
            if (it == principals.end() || it->second.kind != PrincipalKind::organisation)
                n["org"].fail(*p.org + " is not a declared organisation");
        }
        principals.emplace(p.id, p);
        s.principals.push_back(std::move(p));
    });
    auto require_kind = [&](const Node& n, const std::string& id, PrincipalKind kind) {
        auto it = principals.find(id);
        if (it == principals.end()) n.fail("undeclared principal " + id);
        if (it->second.kind != kind) n.fail(id + " is not a " + std::string(to_string(kind)));
    };
    auto require_declared = [&](const Node& n, const std::string& id) {
        if (!principals.count(id)) n.fail("undeclared principal " + id);
    };

    std::map<std::string, ChannelSpec> channels;
    root.each("channels", [&](const Node& n) {
        n.allow_only({"name", "organisation", "companies"});
        ChannelSpec c;
        c.organisation = n["organisation"].str();
        require_kind(n["organisation"], c.organisation, PrincipalKind::organisation);
        c.name = n.has("name") ? n["name"].str() : c.organisation + "-chan";
        if (channels.count(c.name)) n.fail("duplicate channel " + c.name);
        auto cs = n["companies"];
        c.companies = cs.strings();
        if (c.companies.empty()) cs.fail("a channel needs at least one transport company");
        for (std::size_t i = 0; i < c.companies.size(); ++i)
            require_kind(cs[i], c.companies[i], PrincipalKind::transport_company);
        channels.emplace(c.name, c);
        s.channels.push_back(std::move(c));
    });
    auto channel_of = [&](const Node& n) -> const ChannelSpec& {
        auto it = channels.find(n.str());
        if (it == channels.end()) n.fail("undeclared channel " + n.str());
        return it->second;
    };
    auto require_company = [&](const Node& n, const ChannelSpec& c, const std::string& id) {
        if (std::find(c.companies.begin(), c.companies.end(), id) == c.companies.end())
            n.fail(id + " is not a transport company on " + c.name);
    };

    root.each("funding", [&](const Node& n) {
        n.allow_only({"channel", "owner", "amount"});
        FundingSpec f{channel_of(n["channel"]).name, n["owner"].str(), n["amount"].nonneg()};
        require_declared(n["owner"], f.owner);
        s.funding.push_back(std::move(f));
    });

    root.each("purchases", [&](const Node& n) {
        n.allow_only({"channel", "company", "ask", "bid", "credits", "price_list", "deposit_tokens",
                      "deposit_payment"});
        PurchaseSpec p;
        const auto& ch = channel_of(n["channel"]);
        p.channel = ch.name;
        p.company = n["company"].str();
        require_company(n["company"], ch, p.company);
        p.ask = n["ask"].positive();
        p.bid = n["bid"].nonneg();
        p.credits = n["credits"].positive();
        auto pl = n["price_list"];
        if (!pl.raw().is_object() || pl.raw().empty()) pl.fail("expected a non-empty object");
        for (const auto& [k, v] : pl.raw().items()) p.price_list[k] = pl[k.c_str()].nonneg();
        if (n.has("deposit_tokens")) p.deposit_tokens = n["deposit_tokens"].nonneg();
        if (n.has("deposit_payment")) p.deposit_payment = n["deposit_payment"].nonneg();
        s.purchases.push_back(std::move(p));
    });

    std::set<std::string> deployed;
    root.each("access", [&](const Node& n) {
        n.allow_only({"channel", "conditions"});
        AccessSpec a;
        a.channel = channel_of(n["channel"]).name;
        if (!deployed.insert(a.channel).second) n["channel"].fail("access contract already deployed on " + a.channel);
        if (n.has("conditions")) a.conditions = n["conditions"].condition();
        s.access.push_back(std::move(a));
    });

    std::map<std::string, std::set<std::string>> labels;
    root.each("delegations", [&](const Node& n) {
        auto d = parse_delegation(n);
        channel_of(n["channel"]);
        if (!deployed.count(d.channel)) n["channel"].fail("no access contract deployed on " + d.channel);
        require_declared(n["as"], d.as);
        auto& known = labels[d.channel];
        const auto& target = n[d.action == DelegationSpec::Action::delegate ? "parent" : "node"];
        if (d.parent != access::kRootNode && !known.count(d.parent))
            target.fail("unknown delegation label " + d.parent);
        if (d.action == DelegationSpec::Action::delegate) {
            require_declared(n["grantee"], d.grantee);
            if (!d.label.empty() && !known.insert(d.label).second) n["label"].fail("duplicate label " + d.label);
        }
        s.delegations.push_back(std::move(d));
    });

    root.each("trips", [&](const Node& n) {
        auto t = parse_trip(n);
        const auto& ch = channel_of(n["channel"]);
        require_kind(n["employee"], t.plan.request.employee, PrincipalKind::employee);
        require_company(n["company"], ch, t.plan.request.company);
        if (t.plan.submitter) require_declared(n["submitter"], *t.plan.submitter);
        s.trips.push_back(std::move(t));
    });
    return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw Error(Errc::validation_error, "line " + std::to_string(line) + ", column " +
                                                std::to_string(col) + ": malformed JSON");
    }
    try {
        if (!doc.is_object()) throw Invalid{{}, "a scenario is a JSON object"};
        return parse_document(Node(doc, {}));
    } catch (const Invalid& inv) {
        auto [line, col] = line_col(text, Locator(text).find(inv.path));
        throw Error(Errc::validation_error, "line " + std::to_string(line) + ", column " +
                                                std::to_string(col) + ": " + pointer(inv.path) + ": " +
                                                inv.message);
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace transit::scenario
