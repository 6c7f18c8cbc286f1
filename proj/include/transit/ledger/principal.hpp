#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace transit {

using PrincipalId = std::string;

enum class PrincipalKind { organisation, department, employee, transport_company, network_admin };

std::string_view to_string(PrincipalKind k) noexcept;
PrincipalKind parse_principal_kind(std::string_view s);

struct Principal {
    PrincipalId id;
    PrincipalKind kind = PrincipalKind::employee;
    std::optional<PrincipalId> org;  // required for employees and departments
    std::string role;

    bool belongs_to(std::string_view organisation) const {
        return (kind == PrincipalKind::organisation && id == organisation) ||
               (org && *org == organisation);
    }

    friend bool operator==(const Principal&, const Principal&) = default;
};

nlohmann::json to_json(const Principal& p);
Principal principal_from_json(const nlohmann::json& j);

/// Network-wide principal registry. Ids are unique; lookups return copies so
/// callers never hold references into a map another thread may grow.
class Directory {
public:
    /// Throws duplicate-principal, unknown-principal (owning org missing) or
    /// wrong-principal-kind (employee/department without an organisation).
    void add(Principal p);

    std::optional<Principal> find(std::string_view id) const;
    Principal get(std::string_view id) const;  // throws unknown-principal
    bool contains(std::string_view id) const;
    std::vector<Principal> all() const;

private:
    mutable std::shared_mutex mu_;
    std::map<PrincipalId, Principal, std::less<>> by_id_;
};

}  // namespace transit
