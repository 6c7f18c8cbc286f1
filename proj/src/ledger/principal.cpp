#include "transit/ledger/principal.hpp"

#include "transit/common/error.hpp"

#include <mutex>

namespace transit {

std::string_view to_string(PrincipalKind k) noexcept {
    switch (k) {
    case PrincipalKind::organisation: return "organisation";
    case PrincipalKind::department: return "department";
    case PrincipalKind::employee: return "employee";
    case PrincipalKind::transport_company: return "transport-company";
    case PrincipalKind::network_admin: return "network-admin";
    }
    return "?";
}

PrincipalKind parse_principal_kind(std::string_view s) {
    for (auto k : {PrincipalKind::organisation, PrincipalKind::department, PrincipalKind::employee,
                   PrincipalKind::transport_company, PrincipalKind::network_admin})
        if (to_string(k) == s) return k;
    throw Error(Errc::invalid_argument, "unknown principal kind '" + std::string(s) + "'");
}

nlohmann::json to_json(const Principal& p) {
    nlohmann::json j{{"id", p.id}, {"kind", to_string(p.kind)}, {"role", p.role}};
    j["org"] = p.org ? nlohmann::json(*p.org) : nlohmann::json(nullptr);
    return j;
}

Principal principal_from_json(const nlohmann::json& j) {
    Principal p;
    p.id = j.at("id").get<std::string>();
    p.kind = parse_principal_kind(j.at("kind").get<std::string>());
    if (j.contains("org") && !j["org"].is_null()) p.org = j["org"].get<std::string>();
    if (j.contains("role")) p.role = j["role"].get<std::string>();
    return p;
}

void Directory::add(Principal p) {
    if (p.id.empty()) throw Error(Errc::invalid_argument, "empty principal id");
    std::unique_lock lk(mu_);
    if (by_id_.count(p.id)) throw Error(Errc::duplicate_principal, p.id);
    const bool needs_org =
        p.kind == PrincipalKind::employee || p.kind == PrincipalKind::department;
    if (needs_org && !p.org)
        throw Error(Errc::wrong_principal_kind, p.id + " must carry an organisation");
    if (p.org) {
        auto it = by_id_.find(*p.org);
        if (it == by_id_.end()) throw Error(Errc::unknown_principal, *p.org);
        if (it->second.kind != PrincipalKind::organisation)
            throw Error(Errc::wrong_principal_kind, *p.org + " is not an organisation");
    }
    by_id_.emplace(p.id, std::move(p));
}

std::optional<Principal> Directory::find(std::string_view id) const {
    std::shared_lock lk(mu_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

Principal Directory::get(std::string_view id) const {
    auto p = find(id);
    if (!p) throw Error(Errc::unknown_principal, std::string(id));
    return *p;
}

bool Directory::contains(std::string_view id) const {
    std::shared_lock lk(mu_);
    return by_id_.find(id) != by_id_.end();
}

std::vector<Principal> Directory::all() const {
    std::shared_lock lk(mu_);
    std::vector<Principal> out;
    out.reserve(by_id_.size());
    for (const auto& [_, p] : by_id_) out.push_back(p);
    return out;
}

}  // namespace transit
