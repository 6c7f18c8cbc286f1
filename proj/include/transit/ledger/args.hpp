#pragma once

#include "transit/common/error.hpp"

#include <cstdint>
#include <string>

#include <json.hpp>

// Argument accessors for contract code; failures become ContractError so the
// transaction is recorded as an endorsement error.
namespace transit::args {

inline const nlohmann::json& required(const nlohmann::json& a, const char* name) {
    if (!a.is_object() || !a.contains(name))
        throw ContractError("bad-argument", std::string("missing '") + name + "'");
    return a[name];
}

inline std::string str(const nlohmann::json& a, const char* name) {
    const auto& v = required(a, name);
    if (!v.is_string() || v.get_ref<const std::string&>().empty())
        throw ContractError("bad-argument", std::string("'") + name + "' must be a non-empty string");
    return v.get<std::string>();
}

inline std::int64_t integer(const nlohmann::json& a, const char* name) {
    const auto& v = required(a, name);
    if (!v.is_number_integer())
        throw ContractError("bad-argument", std::string("'") + name + "' must be an integer");
    return v.get<std::int64_t>();
}

inline std::int64_t nonneg(const nlohmann::json& a, const char* name) {
    auto v = integer(a, name);
    if (v < 0) throw ContractError("bad-argument", std::string("'") + name + "' must be >= 0");
    return v;
}

}  // namespace transit::args
